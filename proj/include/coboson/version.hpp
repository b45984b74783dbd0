#pragma once

namespace coboson {
inline constexpr const char* kVersion = "0.1.0";
}
