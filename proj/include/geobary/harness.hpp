#pragma once

#include "geobary/harness/csv.hpp"
#include "geobary/harness/rates.hpp"
#include "geobary/harness/svg.hpp"
