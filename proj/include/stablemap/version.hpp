#pragma once

namespace stablemap {
inline constexpr const char* version_string = "0.1.0";
}
