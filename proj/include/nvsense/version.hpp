#pragma once

namespace nvsense {
inline constexpr const char* kVersion = "0.1.0";
}
