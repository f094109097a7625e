#pragma once

#include "sidql/agent.hpp"
#include "sidql/amc.hpp"
#include "sidql/baselines.hpp"
#include "sidql/dataset.hpp"
#include "sidql/error.hpp"
#include "sidql/geometry.hpp"
#include "sidql/keyframes.hpp"
#include "sidql/kinematics.hpp"
#include "sidql/metrics.hpp"
#include "sidql/motion.hpp"
#include "sidql/neural.hpp"
#include "sidql/preprocess.hpp"
#include "sidql/reconstruct.hpp"
#include "sidql/replay.hpp"
#include "sidql/rng.hpp"
#include "sidql/skeleton.hpp"
#include "sidql/spherical.hpp"
#include "sidql/synthetic.hpp"
