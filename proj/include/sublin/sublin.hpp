#pragma once

#include "sublin/analysis.hpp"
#include "sublin/distinguishers.hpp"
#include "sublin/estimator.hpp"
#include "sublin/graph.hpp"
#include "sublin/hard_instance.hpp"
#include "sublin/matching.hpp"
#include "sublin/query.hpp"
#include "sublin/rng.hpp"
#include "sublin/tree_probe.hpp"
#include "sublin/version.hpp"
