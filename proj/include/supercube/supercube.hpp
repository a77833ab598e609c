#pragma once

// Umbrella header: exact Grassmann calculus, the interpolated-covariance
// identities, the superspace reduction checks, and the probabilistic
// verification harness built on them.

#include "supercube/config.hpp"
#include "supercube/covariance.hpp"
#include "supercube/grassmann.hpp"
#include "supercube/matrix.hpp"
#include "supercube/normal.hpp"
#include "supercube/polynomial.hpp"
#include "supercube/probability.hpp"
#include "supercube/quadrature.hpp"
#include "supercube/random_matrices.hpp"
#include "supercube/report.hpp"
#include "supercube/ring.hpp"
#include "supercube/rng.hpp"
#include "supercube/sobol.hpp"
#include "supercube/suites.hpp"
#include "supercube/super.hpp"
