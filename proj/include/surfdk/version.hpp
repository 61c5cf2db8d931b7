#pragma once

#define SURFDK_VERSION_MAJOR 0
#define SURFDK_VERSION_MINOR 1
#define SURFDK_VERSION_PATCH 0
#define SURFDK_VERSION_STRING "0.1.0"
