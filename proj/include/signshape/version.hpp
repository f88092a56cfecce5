#pragma once

namespace signshape {

inline constexpr const char* kVersion = "0.1.0";

}
