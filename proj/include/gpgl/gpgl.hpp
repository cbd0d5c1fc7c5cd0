#pragma once

#include "gpgl/augment.hpp"
#include "gpgl/dataset.hpp"
#include "gpgl/error.hpp"
#include "gpgl/graph.hpp"
#include "gpgl/grid_tensor.hpp"
#include "gpgl/layout.hpp"
#include "gpgl/nn/layers.hpp"
#include "gpgl/nn/msm_conv.hpp"
#include "gpgl/nn/network.hpp"
#include "gpgl/nn/tensor.hpp"
#include "gpgl/nn/train.hpp"
#include "gpgl/parallel.hpp"
#include "gpgl/random.hpp"
#include "gpgl/svg.hpp"
