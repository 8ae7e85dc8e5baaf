#pragma once

namespace nlwave {

inline constexpr const char* kVersionTag = "nlwave 0.1.0";

}  // namespace nlwave
