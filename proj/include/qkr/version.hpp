#pragma once

namespace qkr {

// Stamped into run records so result files identify the code that made them.
inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kRecordVersion = 1;

}  // namespace qkr
