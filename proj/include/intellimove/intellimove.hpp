#pragma once

#include "intellimove/bench.hpp"
#include "intellimove/discovery.hpp"
#include "intellimove/envgen.hpp"
#include "intellimove/errors.hpp"
#include "intellimove/graph.hpp"
#include "intellimove/mapio.hpp"
#include "intellimove/metric.hpp"
#include "intellimove/pipeline.hpp"
#include "intellimove/planner.hpp"
#include "intellimove/segmentation.hpp"
#include "intellimove/semantic_map.hpp"
