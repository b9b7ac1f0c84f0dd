#pragma once

#include "morphoseg/baseline_cc.hpp"
#include "morphoseg/connectivity.hpp"
#include "morphoseg/groundtruth.hpp"
#include "morphoseg/image.hpp"
#include "morphoseg/morpho_filters.hpp"
#include "morphoseg/pipeline.hpp"
#include "morphoseg/raster_io.hpp"
#include "morphoseg/shape_eval.hpp"
#include "morphoseg/watershed.hpp"
