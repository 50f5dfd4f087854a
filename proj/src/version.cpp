#include "vecmag/version.hpp"

namespace vecmag {

const char* version() { return VECMAG_VERSION; }

}  // namespace vecmag
