#pragma once

#include "prosim/arbitrage.hpp"
#include "prosim/inverter.hpp"
#include "prosim/lp.hpp"
#include "prosim/metrics.hpp"
#include "prosim/powerflow.hpp"
#include "prosim/prosumer.hpp"
#include "prosim/scenario_io.hpp"
#include "prosim/simulation.hpp"
#include "prosim/synthetic.hpp"
