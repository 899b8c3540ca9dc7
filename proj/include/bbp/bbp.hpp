#pragma once

// Binary beam-pointing channel toolkit: channel simulation with in-block
// memory and delayed noiseless feedback, ambiguity-set state estimation,
// adaptive probing policies, the closed-form minimum distortion, an exact
// policy oracle, and a Monte Carlo harness.

#include "bbp/analysis.hpp"
#include "bbp/channel.hpp"
#include "bbp/core.hpp"
#include "bbp/estimator.hpp"
#include "bbp/oracle.hpp"
#include "bbp/policy.hpp"
#include "bbp/rational.hpp"
#include "bbp/report_io.hpp"
#include "bbp/rng.hpp"
#include "bbp/simulate.hpp"
