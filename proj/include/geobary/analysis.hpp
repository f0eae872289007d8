#pragma once

#include "geobary/analysis/bounds.hpp"
#include "geobary/analysis/convexity.hpp"
#include "geobary/analysis/covering.hpp"
#include "geobary/analysis/extension.hpp"
#include "geobary/analysis/pc_identity.hpp"
#include "geobary/analysis/variance.hpp"
