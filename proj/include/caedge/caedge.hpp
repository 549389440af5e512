#pragma once

#include "caedge/bench.hpp"
#include "caedge/ca.hpp"
#include "caedge/errors.hpp"
#include "caedge/fitness.hpp"
#include "caedge/ga.hpp"
#include "caedge/grid.hpp"
#include "caedge/persist.hpp"
#include "caedge/rng.hpp"
