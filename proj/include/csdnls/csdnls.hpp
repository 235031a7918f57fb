#pragma once

#include "csdnls/diagnostics.hpp"
#include "csdnls/errors.hpp"
#include "csdnls/hardy.hpp"
#include "csdnls/lax.hpp"
#include "csdnls/propagator.hpp"
#include "csdnls/random_states.hpp"
#include "csdnls/transform_product.hpp"
