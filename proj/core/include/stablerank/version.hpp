#pragma once

#define STABLERANK_VERSION_MAJOR 0
#define STABLERANK_VERSION_MINOR 1
#define STABLERANK_VERSION_PATCH 0
#define STABLERANK_VERSION_STRING "0.1.0"

namespace stablerank {

inline const char* version() { return STABLERANK_VERSION_STRING; }

}  // namespace stablerank
