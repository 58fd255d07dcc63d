#pragma once

// Umbrella header for the library (the harness is included separately).

#include "robust/error.hpp"
#include "robust/rng.hpp"
#include "robust/interval.hpp"
#include "robust/dgp.hpp"
#include "robust/linalg.hpp"
#include "robust/stats.hpp"
#include "robust/lp.hpp"
#include "robust/family.hpp"
#include "robust/decision.hpp"
#include "robust/updating.hpp"
#include "robust/applied.hpp"
