#pragma once

#include "mlpath/bfs_exact.hpp"
#include "mlpath/feasibility.hpp"
#include "mlpath/dag_heuristic.hpp"
#include "mlpath/experiments.hpp"
#include "mlpath/generators.hpp"
#include "mlpath/ml_samcra.hpp"
#include "mlpath/network.hpp"
#include "mlpath/parallel.hpp"
#include "mlpath/path.hpp"
#include "mlpath/path_json.hpp"
#include "mlpath/pipeline.hpp"
#include "mlpath/random.hpp"
#include "mlpath/search_common.hpp"
#include "mlpath/solve.hpp"
#include "mlpath/topology_io.hpp"
#include "mlpath/trace_matcher.hpp"
#include "mlpath/types.hpp"
#include "mlpath/wcfg.hpp"
#include "mlpath/wpda.hpp"
