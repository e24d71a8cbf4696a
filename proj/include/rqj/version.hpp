#pragma once

namespace rqj {
inline constexpr const char* kVersion = "0.1.0";
}
