#pragma once

#include "graphlog/cg.hpp"
#include "graphlog/families.hpp"
#include "graphlog/graph.hpp"
#include "graphlog/io.hpp"
#include "graphlog/norms.hpp"
#include "graphlog/numeric.hpp"
#include "graphlog/parallel.hpp"
#include "graphlog/potential.hpp"
#include "graphlog/run.hpp"
#include "graphlog/series.hpp"
#include "graphlog/solver.hpp"
#include "graphlog/variational.hpp"
