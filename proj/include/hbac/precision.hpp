// Extended precision used for cycle propagation. Heat and work are
// differences of polarizations that converge geometrically, so by cycle 20
// they sit ~1e-10 below O(1) populations; double precision would leave
// their ratio with only ~6 correct digits.
#pragma once

#include <boost/multiprecision/float128.hpp>

namespace hbac {

using Quad = boost::multiprecision::float128;

}  // namespace hbac
