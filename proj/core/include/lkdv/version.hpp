#pragma once

namespace lkdv {
inline constexpr const char* kVersion = "0.1.0";
}
