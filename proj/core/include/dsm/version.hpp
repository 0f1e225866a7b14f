#pragma once

namespace dsm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dsm
