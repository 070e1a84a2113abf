#pragma once

#define ALPHAZ_VERSION_STRING "0.1.0"

namespace alphaz {

inline constexpr const char* version() { return ALPHAZ_VERSION_STRING; }

}  // namespace alphaz
