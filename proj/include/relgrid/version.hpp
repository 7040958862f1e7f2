#pragma once

namespace relgrid {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace relgrid
