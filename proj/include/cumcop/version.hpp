#pragma once

namespace cumcop {

inline constexpr const char* version = "0.1.0";

}  // namespace cumcop
