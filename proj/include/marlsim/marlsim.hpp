#pragma once

#include "marlsim/admission.hpp"
#include "marlsim/bundled.hpp"
#include "marlsim/cluster.hpp"
#include "marlsim/errors.hpp"
#include "marlsim/manager.hpp"
#include "marlsim/metrics.hpp"
#include "marlsim/rng.hpp"
#include "marlsim/runner.hpp"
#include "marlsim/scenario.hpp"
#include "marlsim/scheduler_choice.hpp"
#include "marlsim/schedulers.hpp"
#include "marlsim/sim_core.hpp"
#include "marlsim/timeline.hpp"
#include "marlsim/workload.hpp"
