#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace chainrep {

// Preimage bounds grow like iterated Ramsey numbers and overflow machine words quickly.
using Bound = boost::multiprecision::cpp_int;

}  // namespace chainrep
