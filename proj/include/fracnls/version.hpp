#pragma once

namespace fracnls {

inline constexpr const char* version = "0.1.0";

}  // namespace fracnls
