#pragma once

namespace corrcmp {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace corrcmp
