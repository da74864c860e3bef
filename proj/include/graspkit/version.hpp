#pragma once

#define GRASPKIT_VERSION_MAJOR 0
#define GRASPKIT_VERSION_MINOR 1
#define GRASPKIT_VERSION_PATCH 0
#define GRASPKIT_VERSION "0.1.0"
