#pragma once

#include "lawrisk/distortion.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/laws.hpp"
#include "lawrisk/lln.hpp"
#include "lawrisk/orlicz.hpp"
#include "lawrisk/quadrature.hpp"
#include "lawrisk/quantiles.hpp"
#include "lawrisk/rng.hpp"
#include "lawrisk/sample.hpp"
#include "lawrisk/young_function.hpp"
