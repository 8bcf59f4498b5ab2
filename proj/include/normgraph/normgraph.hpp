#pragma once

#include "normgraph/core/rng.hpp"
#include "normgraph/core/vec2.hpp"
#include "normgraph/epi/agent.hpp"
#include "normgraph/epi/model.hpp"
#include "normgraph/epi/ode.hpp"
#include "normgraph/epi/params.hpp"
#include "normgraph/harness/pipeline.hpp"
#include "normgraph/io/config.hpp"
#include "normgraph/io/csv.hpp"
#include "normgraph/search/dtw.hpp"
#include "normgraph/search/edges.hpp"
#include "normgraph/search/ga.hpp"
#include "normgraph/search/quadtree.hpp"
#include "normgraph/search/tsxm.hpp"
#include "normgraph/sim/engine.hpp"
#include "normgraph/sim/trajectory.hpp"
#include "normgraph/space/continuous.hpp"
#include "normgraph/space/graph.hpp"
#include "normgraph/walk/mac.hpp"
#include "normgraph/walk/mc.hpp"
#include "normgraph/walk/model.hpp"
