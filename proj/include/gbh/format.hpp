#pragma once

#include <string>

namespace gbh {

/// Shortest decimal string that round-trips to the same double; "inf",
/// "-inf" and "nan" for the special values.
std::string shortest(double v);

}  // namespace gbh
