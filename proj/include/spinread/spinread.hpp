#pragma once

#include "spinread/commands.hpp"
#include "spinread/config.hpp"
#include "spinread/constants.hpp"
#include "spinread/emission_budget.hpp"
#include "spinread/interferometer.hpp"
#include "spinread/physics_model.hpp"
#include "spinread/pipeline.hpp"
#include "spinread/protocol_mc.hpp"
#include "spinread/random.hpp"
#include "spinread/spin_dynamics.hpp"
#include "spinread/statistics.hpp"
#include "spinread/table.hpp"
#include "spinread/units.hpp"
