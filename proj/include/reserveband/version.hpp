#pragma once

namespace reserveband {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace reserveband
