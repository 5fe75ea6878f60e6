#pragma once

namespace veritor {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace veritor
