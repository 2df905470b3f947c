// SPDX-License-Identifier: MIT
//
// Umbrella header: the whole library in one include.

#pragma once

#include "timefork/config.hpp"
#include "timefork/constants.hpp"
#include "timefork/difficulty.hpp"
#include "timefork/errors.hpp"
#include "timefork/forensics.hpp"
#include "timefork/header.hpp"
#include "timefork/io.hpp"
#include "timefork/markov.hpp"
#include "timefork/predicates.hpp"
#include "timefork/rational.hpp"
#include "timefork/rewards.hpp"
#include "timefork/rng.hpp"
#include "timefork/sim.hpp"
#include "timefork/stats.hpp"
#include "timefork/strategy.hpp"
#include "timefork/timing.hpp"
