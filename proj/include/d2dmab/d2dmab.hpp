#pragma once

// Umbrella header for the D2D bandit resource-allocation simulator.

#include "d2dmab/channel.hpp"
#include "d2dmab/config.hpp"
#include "d2dmab/experiment.hpp"
#include "d2dmab/metrics.hpp"
#include "d2dmab/output.hpp"
#include "d2dmab/phy.hpp"
#include "d2dmab/policies.hpp"
#include "d2dmab/rng.hpp"
#include "d2dmab/simulation.hpp"
#include "d2dmab/topology.hpp"
