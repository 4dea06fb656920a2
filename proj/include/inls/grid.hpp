#pragma once

#include "inls/params.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace inls {

using cplx = std::complex<double>;

/// Surface area of the unit sphere in R^N.
inline double sphere_area(int N) { return 2.0 * std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0); }

/// Uniform grid r_i = i·dr on [0, r_max] with trapezoid weights against ω r^{N−1}.
///
/// Alongside the weights the grid carries face coefficients a_{i+1/2} ≈ ω r_{i+1/2}^{N−1}
/// that define the discrete radial Laplacian in flux form. They satisfy the exact identity
///   a_{i+1/2}(2i+1) − a_{i−1/2}(2i−1) = 2N i^{N−1}   (grid units),   a_{1/2} = 0,
/// which makes the stencil exact on constants and r² and keeps Δ self-adjoint in the
/// weighted inner product Σ w_i ū_i v_i.
class RadialGrid {
 public:
  RadialGrid(int dim, double dr, std::size_t n) : dim_(dim), dr_(dr) {
    if (dim < 2) throw PreconditionError("grid dimension must be >= 2");
    if (!(dr > 0.0)) throw PreconditionError("grid spacing must be positive");
    if (n < 3) throw PreconditionError("grid needs at least 3 points");
    r_.resize(n);
    w_.resize(n);
    face_.resize(n);
    vol_.resize(n);
    const double omega = sphere_area(dim);
    for (std::size_t i = 0; i < n; ++i) {
      r_[i] = static_cast<double>(i) * dr;
      vol_[i] = omega * std::pow(r_[i], dim - 1) * dr;
      w_[i] = vol_[i];
    }
    w_[0] *= 0.5;
    w_[n - 1] *= 0.5;
    // c_i = 2N Σ_{j≤i} j^{N−1}; a_{i+1/2} = c_i / (2i+1)
    const double scale = omega * std::pow(dr, dim - 1);
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) c += 2.0 * dim * std::pow(static_cast<double>(i), dim - 1);
      face_[i] = scale * c / (2.0 * static_cast<double>(i) + 1.0);
    }
  }

  /// Grid covering [0, r_max] with spacing as close to dr as an integer node count allows.
  static std::shared_ptr<const RadialGrid> make(int dim, double r_max, double dr) {
    if (!(r_max > 0.0)) throw PreconditionError("r_max must be positive");
    auto cells = static_cast<std::size_t>(std::llround(r_max / dr));
    if (cells < 2) cells = 2;
    return std::make_shared<const RadialGrid>(dim, r_max / static_cast<double>(cells), cells + 1);
  }

  int dim() const { return dim_; }
  double dr() const { return dr_; }
  std::size_t size() const { return r_.size(); }
  double r(std::size_t i) const { return r_[i]; }
  double r_max() const { return r_.back(); }
  const std::vector<double>& nodes() const { return r_; }
  const std::vector<double>& weights() const { return w_; }
  /// face(i) couples node i to node i+1; face(n−1) couples the last node to the Dirichlet ghost.
  double face(std::size_t i) const { return face_[i]; }
  /// Full (unhalved) cell measure ω r_i^{N−1} dr used as the mass matrix of Δ.
  double cell_volume(std::size_t i) const { return vol_[i]; }

 private:
  int dim_;
  double dr_;
  std::vector<double> r_, w_, face_, vol_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Complex radial profile sampled on a shared grid.
struct RadialField {
  GridPtr grid;
  std::vector<cplx> values;

  RadialField() = default;
  explicit RadialField(GridPtr g) : grid(std::move(g)), values(grid->size(), cplx(0.0, 0.0)) {}
  RadialField(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->size()) throw std::invalid_argument("field length differs from grid length");
  }

  template <class F>
  static RadialField sample(GridPtr g, F&& f) {
    RadialField u(g);
    for (std::size_t i = 0; i < g->size(); ++i) u.values[i] = cplx(f(g->r(i)));
    return u;
  }

  std::size_t size() const { return values.size(); }
  const cplx& operator[](std::size_t i) const { return values[i]; }
  cplx& operator[](std::size_t i) { return values[i]; }

  RadialField scaled(cplx c) const {
    RadialField out = *this;
    for (auto& v : out.values) v *= c;
    return out;
  }
  bool finite() const {
    for (const auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
};

inline void require_same_grid(const RadialField& a, const RadialField& b) {
  if (a.grid.get() != b.grid.get() && (a.grid->size() != b.grid->size() || a.grid->dr() != b.grid->dr() ||
                                       a.grid->dim() != b.grid->dim()))
    throw std::invalid_argument("fields live on different grids");
}

/// Linear interpolation of u onto another grid of the same dimension; zero beyond u's r_max.
inline RadialField resample(const RadialField& u, GridPtr target) {
  if (target->dim() != u.grid->dim()) throw std::invalid_argument("resample needs matching dimensions");
  const RadialGrid& src = *u.grid;
  RadialField out(target);
  for (std::size_t i = 0; i < target->size(); ++i) {
    double x = target->r(i) / src.dr();
    auto j = static_cast<std::size_t>(x);
    if (j + 1 >= src.size()) {
      out[i] = (j + 1 == src.size() && x - j < 1e-9) ? u[src.size() - 1] : cplx(0.0);
      continue;
    }
    double f = x - static_cast<double>(j);
    out[i] = (1.0 - f) * u[j] + f * u[j + 1];
  }
  return out;
}

/// Σ w_i f_i.
inline double integrate(const RadialGrid& g, std::span<const double> f) {
  if (f.size() != g.size()) throw std::invalid_argument("sample count differs from grid size");
  const auto& w = g.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw std::domain_error("non-finite sample in integrand");
    s += w[i] * f[i];
  }
  return s;
}

/// ∫ |u|²; the integrand of a complex field is its squared modulus.
inline double integrate(const RadialField& u) {
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = std::norm(u[i]);
  return integrate(*u.grid, f);
}

/// ∫ weight(r)·|∂_r u|² with the derivative taken on cell faces, (u_{i+1} − u_i)/dr,
/// and weight evaluated at face midpoints. With weight ≡ 1 this equals −⟨u, Δu⟩ exactly.
template <class Weight>
double weighted_gradient_sq(const RadialField& u, Weight&& weight) {
  const RadialGrid& g = *u.grid;
  if (g.size() < 3) throw std::invalid_argument("gradient needs at least 3 grid points");
  double s = 0.0;
  const double dr = g.dr();
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    double mid = (static_cast<double>(i) + 0.5) * dr;
    s += g.face(i) * weight(mid) * std::norm(u[i + 1] - u[i]) / dr;
  }
  return s;
}

/// ‖∇u‖²_{L²}.
inline double gradient_sq_norm(const RadialField& u) {
  return weighted_gradient_sq(u, [](double) { return 1.0; });
}

/// Pointwise ∂_r u: centered in the interior, second-order one-sided at the ends.
inline std::vector<cplx> radial_derivative(const RadialField& u) {
  const std::size_t n = u.size();
  const double dr = u.grid->dr();
  std::vector<cplx> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * dr);
  d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dr);
  d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dr);
  return d;
}

/// Radial Laplacian in flux form with Δu(0) = N·u''(0) and a zero ghost beyond r_max.
inline RadialField laplacian(const RadialField& u) {
  const RadialGrid& g = *u.grid;
  const std::size_t n = g.size();
  const double dr = g.dr();
  RadialField out(u.grid);
  out[0] = static_cast<double>(g.dim()) * 2.0 * (u[1] - u[0]) / (dr * dr);
  for (std::size_t i = 1; i < n; ++i) {
    cplx right = (i + 1 < n ? u[i + 1] : cplx(0.0)) - u[i];
    cplx left = u[i] - u[i - 1];
    out[i] = (g.face(i) * right - g.face(i - 1) * left) / (dr * g.cell_volume(i));
  }
  return out;
}

}  // namespace inls
