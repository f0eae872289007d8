#pragma once

#include "geobary/analysis.hpp"
#include "geobary/barycenter.hpp"
#include "geobary/functionals.hpp"
#include "geobary/harness.hpp"
#include "geobary/measure.hpp"
#include "geobary/metric_core.hpp"
#include "geobary/sinkhorn.hpp"
#include "geobary/spaces/euclidean.hpp"
#include "geobary/spaces/gaussian.hpp"
#include "geobary/spaces/grid_wasserstein.hpp"
#include "geobary/spaces/sphere.hpp"
#include "geobary/spaces/spider.hpp"
#include "geobary/spaces/transport.hpp"
#include "geobary/spaces/wasserstein1d.hpp"
