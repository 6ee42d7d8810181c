#pragma once

#include "stablemap/baseline.hpp"
#include "stablemap/errors.hpp"
#include "stablemap/fastslow.hpp"
#include "stablemap/harness.hpp"
#include "stablemap/levy.hpp"
#include "stablemap/models.hpp"
#include "stablemap/path.hpp"
#include "stablemap/rng.hpp"
#include "stablemap/stable.hpp"
#include "stablemap/stats.hpp"
#include "stablemap/thaler.hpp"
#include "stablemap/version.hpp"
