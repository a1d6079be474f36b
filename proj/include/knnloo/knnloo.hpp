#pragma once

#include "knnloo/bench.hpp"
#include "knnloo/data.hpp"
#include "knnloo/dataset.hpp"
#include "knnloo/error.hpp"
#include "knnloo/instrumentation.hpp"
#include "knnloo/loocv.hpp"
#include "knnloo/matrix.hpp"
#include "knnloo/neighbor_index.hpp"
#include "knnloo/regression.hpp"
#include "knnloo/synth.hpp"
