#pragma once

#include "dpgexp/coefficients.hpp"
#include "dpgexp/convergence.hpp"
#include "dpgexp/csr_matrix.hpp"
#include "dpgexp/expm.hpp"
#include "dpgexp/integrators.hpp"
#include "dpgexp/io.hpp"
#include "dpgexp/linear_operator.hpp"
#include "dpgexp/linearization.hpp"
#include "dpgexp/phi.hpp"
#include "dpgexp/problems.hpp"
#include "dpgexp/system.hpp"
#include "dpgexp/types.hpp"
