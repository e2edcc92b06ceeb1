#pragma once

#include <string>
#include <string_view>

#include "qcopt/gate.hpp"

namespace qcopt {

/// OpenQASM 2.0 subset -> Circuit. Native gates rx/ry/rz/rxx/cz map onto the
/// IR kinds; h/x/z/s/sdg/t/tdg/cx/ccx are desugared into them on import
/// (unitary preserved up to global phase). Exactly one qreg, no creg, no
/// measurement. Throws ParseError with a 1-based line number.
Circuit parse_qasm(std::string_view text);

/// Circuit -> OpenQASM 2.0 text over rx/ry/rz/rxx/cz only. Angles are printed
/// with 17 significant digits, so parse_qasm(emit_qasm(c)) is gate-identical.
std::string emit_qasm(const Circuit& c);

/// Angle sub-grammar shared with the parser: [sign] ("pi" | number ["*" "pi"])
/// ["/" number]. Exposed for tests.
double parse_angle_expr(std::string_view expr, int line);

}  // namespace qcopt
