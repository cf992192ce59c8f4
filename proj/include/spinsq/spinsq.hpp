// spinsq.hpp - umbrella header
#pragma once

#include "backaction.hpp"
#include "config.hpp"
#include "dicke.hpp"
#include "errors.hpp"
#include "numeric.hpp"
#include "optics.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "planner.hpp"
#include "squeezing.hpp"
