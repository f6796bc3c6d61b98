#pragma once

#include "salsum/color_features.hpp"
#include "salsum/error.hpp"
#include "salsum/evaluation.hpp"
#include "salsum/experiments.hpp"
#include "salsum/fusion.hpp"
#include "salsum/image.hpp"
#include "salsum/ingestion.hpp"
#include "salsum/optical_flow.hpp"
#include "salsum/pipeline.hpp"
#include "salsum/saliency.hpp"
#include "salsum/selection.hpp"
#include "salsum/synthetic.hpp"
