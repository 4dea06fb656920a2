#pragma once

// Umbrella header for the radial inhomogeneous NLS toolkit.

#include "inls/cutoffs.hpp"
#include "inls/evolution.hpp"
#include "inls/exponents.hpp"
#include "inls/functionals.hpp"
#include "inls/grid.hpp"
#include "inls/ground_state.hpp"
#include "inls/inequalities.hpp"
#include "inls/params.hpp"
#include "inls/rational.hpp"
#include "inls/threshold.hpp"
#include "inls/virial.hpp"
