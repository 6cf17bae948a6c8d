#pragma once

namespace rankcert {

inline constexpr const char* kVersion = "0.1.0";

}
