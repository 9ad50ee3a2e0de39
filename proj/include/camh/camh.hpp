// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "camh/camheight.hpp"
#include "camh/core.hpp"
#include "camh/epoch_optimizer.hpp"
#include "camh/geometry.hpp"
#include "camh/io.hpp"
#include "camh/losses.hpp"
#include "camh/metrics.hpp"
#include "camh/outlier_filter.hpp"
#include "camh/pipeline.hpp"
#include "camh/silhouette.hpp"
#include "camh/simulator.hpp"
#include "camh/size_prior.hpp"
