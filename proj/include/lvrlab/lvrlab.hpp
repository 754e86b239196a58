#pragma once

#include "lvrlab/agents.hpp"
#include "lvrlab/amm.hpp"
#include "lvrlab/error.hpp"
#include "lvrlab/ev.hpp"
#include "lvrlab/experiments.hpp"
#include "lvrlab/gbm.hpp"
#include "lvrlab/hooks.hpp"
#include "lvrlab/io.hpp"
#include "lvrlab/optimize.hpp"
#include "lvrlab/parallel.hpp"
#include "lvrlab/random.hpp"
