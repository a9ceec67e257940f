#pragma once

// Everything except serialization.hpp, which needs nlohmann/json.

#include "alpha.hpp"
#include "closed_forms.hpp"
#include "copula.hpp"
#include "csv.hpp"
#include "dependence.hpp"
#include "dynamics.hpp"
#include "empirical.hpp"
#include "errors.hpp"
#include "independence.hpp"
#include "matrix.hpp"
#include "measures.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "random.hpp"
#include "rank_matrix.hpp"
#include "sampling.hpp"
#include "sobol.hpp"
#include "timeseries.hpp"
#include "version.hpp"
