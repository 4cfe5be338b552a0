#pragma once

namespace gnep {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gnep
