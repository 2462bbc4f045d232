#pragma once

#include <string>

#include "rr/chart/field.hpp"

namespace rr::chart {

/// Parses the field expression dialect.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'x' | 'y' | 'z' | 'tau' | 'pi' | func '(' expr ')' | '(' expr ')'
///   func    := 'sin' | 'cos' | 'exp' | 'log' | 'sqrt'
///
/// `tau` is an alias for the third coordinate. Throws InvalidInput with the
/// offending column on malformed input.
ScalarField parse_expression(const std::string& text);

}  // namespace rr::chart
