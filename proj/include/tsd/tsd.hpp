#pragma once

#include "tsd/basis.hpp"
#include "tsd/checks.hpp"
#include "tsd/config.hpp"
#include "tsd/constants.hpp"
#include "tsd/csv.hpp"
#include "tsd/ensembles.hpp"
#include "tsd/hamiltonians.hpp"
#include "tsd/metrics.hpp"
#include "tsd/parallel.hpp"
#include "tsd/propagator.hpp"
#include "tsd/sequence.hpp"
#include "tsd/stark.hpp"
#include "tsd/types.hpp"
