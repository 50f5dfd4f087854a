#pragma once

namespace vecmag {

/// Library version string, e.g. "0.1.0".
const char* version();

}  // namespace vecmag
