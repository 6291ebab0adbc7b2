#pragma once

namespace sudest {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sudest
