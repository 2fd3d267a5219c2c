#pragma once

#include <string>

#include "spin7/poly.hpp"
#include "spin7/structure.hpp"

namespace spin7 {

// Polynomial in nu0..nu3 with integer or rational literals and + - * ^ and parentheses.
// Throws ParseError with the offending position.
Poly parse_poly(const std::string& text);

// "V=diag(p0,p1,p2,p3)", "V=Id" or "V=[v00,v01,v02,v03,v11,v12,v13,v22,v23,v33]";
// the "V=" prefix is optional.
SymMatrixField parse_field(const std::string& text);

}  // namespace spin7
