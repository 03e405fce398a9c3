#pragma once

namespace dvnet {

inline constexpr const char* kVersion = "0.1.0";

}
