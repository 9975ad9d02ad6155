#pragma once

#include "mined/analysis.hpp"
#include "mined/correction_set.hpp"
#include "mined/embeddings.hpp"
#include "mined/error.hpp"
#include "mined/evalharness.hpp"
#include "mined/lattice.hpp"
#include "mined/metrics.hpp"
#include "mined/textalign.hpp"
