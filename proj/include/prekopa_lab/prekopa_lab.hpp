#pragma once

#include "bergman.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "marginal.hpp"
#include "mep.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "report.hpp"
#include "smoothing.hpp"
#include "weights.hpp"
