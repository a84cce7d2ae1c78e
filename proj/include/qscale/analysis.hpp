#pragma once

#include "qscale/analysis/bounds.hpp"
#include "qscale/analysis/committee.hpp"
#include "qscale/analysis/complexity.hpp"
#include "qscale/analysis/numerics.hpp"
#include "qscale/analysis/propagation.hpp"
#include "qscale/analysis/result.hpp"
