#pragma once

#include "hyrrt/error.hpp"
#include "hyrrt/hybrid_time.hpp"
#include "hyrrt/input_library.hpp"
#include "hyrrt/planner.hpp"
#include "hyrrt/region.hpp"
#include "hyrrt/search_tree.hpp"
#include "hyrrt/simulation.hpp"
#include "hyrrt/system.hpp"
#include "hyrrt/systems/bouncing_ball.hpp"
#include "hyrrt/systems/discrete_chain.hpp"
#include "hyrrt/validation.hpp"
