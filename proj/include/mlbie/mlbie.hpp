#pragma once

#include "mlbie/analytic.hpp"
#include "mlbie/bie.hpp"
#include "mlbie/cases.hpp"
#include "mlbie/error_metrics.hpp"
#include "mlbie/errors.hpp"
#include "mlbie/geometry.hpp"
#include "mlbie/io.hpp"
#include "mlbie/kress.hpp"
#include "mlbie/layer_config.hpp"
#include "mlbie/mesh_adapt.hpp"
#include "mlbie/resolution_search.hpp"
#include "mlbie/specfun.hpp"
#include "mlbie/vec2.hpp"
