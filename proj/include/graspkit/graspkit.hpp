#pragma once

#include "graspkit/camera.hpp"
#include "graspkit/crop.hpp"
#include "graspkit/geometry.hpp"
#include "graspkit/label_map.hpp"
#include "graspkit/metrics.hpp"
#include "graspkit/planner.hpp"
#include "graspkit/png_io.hpp"
#include "graspkit/render.hpp"
#include "graspkit/rng.hpp"
#include "graspkit/scene_gen.hpp"
#include "graspkit/version.hpp"
