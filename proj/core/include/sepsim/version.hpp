#pragma once

namespace sepsim {
inline constexpr const char* kVersion = "0.1.0";
}
