#include "vkg/green.hpp"

// Header-only; this translation unit pins the header into the library build.
