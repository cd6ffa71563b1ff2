#pragma once

// Umbrella header for the MCvD-with-drift toolkit.

#include "mcvd/arrival_models.hpp"
#include "mcvd/config.hpp"
#include "mcvd/config_file.hpp"
#include "mcvd/error_analysis.hpp"
#include "mcvd/experiments.hpp"
#include "mcvd/heatmap.hpp"
#include "mcvd/io.hpp"
#include "mcvd/metrics.hpp"
#include "mcvd/parallel.hpp"
#include "mcvd/phi_cache.hpp"
#include "mcvd/rng.hpp"
#include "mcvd/sim_core.hpp"
#include "mcvd/special_functions.hpp"
#include "mcvd/types.hpp"
