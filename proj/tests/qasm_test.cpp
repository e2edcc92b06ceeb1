#include <doctest.h>

#include "qcopt/qasm.hpp"
#include "qcopt/rng.hpp"
#include "qcopt/unitary.hpp"
#include "testutil.hpp"

using namespace qcopt;
using testutil::kPi;

namespace {

const char* kHeader = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\n";

Circuit parse_body(const std::string& body) { return parse_qasm(std::string(kHeader) + body); }

/// Oracle for controlled-X chains: permutation matrix flipping `target` when
/// all controls are set. Built bitwise, independent of the gate engine.
Unitary controlled_x(int width, std::vector<int> controls, int target) {
    Eigen::Index dim = Eigen::Index{1} << width;
    Unitary m = Unitary::Zero(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        bool all = true;
        for (int ctl : controls) all = all && ((c >> ctl) & 1);
        m(all ? c ^ (Eigen::Index{1} << target) : c, c) = 1;
    }
    return m;
}

}  // namespace

TEST_SUITE("qasm") {

TEST_CASE("native gates parse") {
    Circuit c = parse_body("rx(pi) q[0];\nrz(-pi/2) q[1];\nrxx(3*pi/4) q[0],q[2];\ncz q[2],q[1];\n");
    REQUIRE(c.size() == 4);
    CHECK(c.width == 3);
    CHECK(c.gates[0] == Gate::rx(0, kPi));
    CHECK(c.gates[1] == Gate::rz(1, -kPi / 2));
    CHECK(c.gates[2] == Gate::rxx(0, 2, 3 * kPi / 4));
    CHECK(c.gates[3] == Gate::cz(2, 1));
}

TEST_CASE("angle expressions") {
    CHECK(parse_angle_expr("pi", 1) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(parse_angle_expr("-pi/2", 1) == doctest::Approx(-kPi / 2));
    CHECK(parse_angle_expr("3*pi/4", 1) == doctest::Approx(3 * kPi / 4));
    CHECK(parse_angle_expr("2*pi", 1) == doctest::Approx(2 * kPi));
    CHECK(parse_angle_expr("0.5", 1) == doctest::Approx(0.5));
    CHECK(parse_angle_expr("1e-3", 1) == doctest::Approx(1e-3));
    CHECK(parse_angle_expr(" + pi / 8 ", 1) == doctest::Approx(kPi / 8));
    CHECK(parse_angle_expr("7/8", 1) == doctest::Approx(0.875));
    CHECK_THROWS_AS(parse_angle_expr("pi*", 1), ParseError);
    CHECK_THROWS_AS(parse_angle_expr("foo", 1), ParseError);
    CHECK_THROWS_AS(parse_angle_expr("1/0", 1), ParseError);
    CHECK_THROWS_AS(parse_angle_expr("2*3", 1), ParseError);
    CHECK_THROWS_AS(parse_angle_expr("", 1), ParseError);
}

TEST_CASE("cz pair gives the identity") {
    Circuit c = parse_body("cz q[0],q[1];\ncz q[0],q[1];\n");
    CHECK((circuit_unitary(c) - Unitary::Identity(8, 8)).norm() < 1e-12);
}

TEST_CASE("x desugars to rx(pi), unitary X up to phase") {
    Circuit c = parse_qasm("OPENQASM 2.0;\nqreg r[1];\nx r[0];\n");
    REQUIRE(c.size() == 1);
    CHECK(c.gates[0] == Gate::rx(0, kPi));
    CHECK(equal_up_to_phase(circuit_unitary(c), testutil::pauli_x(), 1e-9).equal);
}

TEST_CASE("single-qubit sugar matches its unitaries up to phase") {
    struct Case {
        const char* text;
        Eigen::Matrix2cd want;
    };
    Eigen::Matrix2cd h;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    std::vector<Case> cases = {
        {"h q[0];", h},
        {"z q[0];", testutil::pauli_z()},
        {"s q[0];", Eigen::Vector2cd(1, std::complex<double>(0, 1)).asDiagonal()},
        {"sdg q[0];", Eigen::Vector2cd(1, std::complex<double>(0, -1)).asDiagonal()},
        {"t q[0];", Eigen::Vector2cd(1, std::exp(std::complex<double>(0, kPi / 4))).asDiagonal()},
        {"tdg q[0];",
         Eigen::Vector2cd(1, std::exp(std::complex<double>(0, -kPi / 4))).asDiagonal()},
    };
    for (const auto& kase : cases) {
        CAPTURE(kase.text);
        Circuit c = parse_qasm(std::string("OPENQASM 2.0;\nqreg q[1];\n") + kase.text);
        Unitary sub = circuit_unitary(c);
        CHECK(equal_up_to_phase(sub, Unitary(kase.want), 1e-9).equal);
    }
}

TEST_CASE("cx desugars to a CNOT up to phase") {
    Circuit c = parse_body("cx q[0],q[1];\n");
    CHECK(c.count_kind(GateKind::CZ) == 1);
    CHECK(equal_up_to_phase(circuit_unitary(c), controlled_x(3, {0}, 1), 1e-9).equal);
    Circuit r = parse_body("cx q[2],q[0];\n");
    CHECK(equal_up_to_phase(circuit_unitary(r), controlled_x(3, {2}, 0), 1e-9).equal);
}

TEST_CASE("ccx desugars to a Toffoli up to phase") {
    Circuit c = parse_body("ccx q[0],q[1],q[2];\n");
    CHECK(equal_up_to_phase(circuit_unitary(c), controlled_x(3, {0, 1}, 2), 1e-9).equal);
    Circuit r = parse_body("ccx q[2],q[0],q[1];\n");
    CHECK(equal_up_to_phase(circuit_unitary(r), controlled_x(3, {2, 0}, 1), 1e-9).equal);
}

TEST_CASE("round-trip is gate-identical for both gate sets") {
    for (uint64_t seed = 0; seed < 6; ++seed) {
        Circuit c = random_circuit(4, 50, seed % 2 ? GateSet::nisq() : GateSet::iontrap(),
                                   derive_seed(71, seed));
        Circuit back = parse_qasm(emit_qasm(c));
        CHECK(gates_identical(back, c));
    }
}

TEST_CASE("emit prints angles with 17 significant digits") {
    double awkward = 0.1 + 0.2;  // not representable prettily
    Circuit c{1, {Gate::rx(0, awkward)}};
    std::string text = emit_qasm(c);
    Circuit back = parse_qasm(text);
    CHECK(back.gates[0].angle == awkward);
    CHECK(text.find("rx(0.30000000000000004)") != std::string::npos);
}

TEST_CASE("emit layout") {
    Circuit c{2, {Gate::cz(0, 1)}};
    CHECK(emit_qasm(c) ==
          "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncz q[0],q[1];\n");
    CHECK(emit_qasm(Circuit{3, {}}) ==
          "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\n");
    CHECK_THROWS_AS(emit_qasm(Circuit{0, {}}), ConfigError);
}

TEST_CASE("comments and whitespace are tolerated") {
    Circuit c = parse_qasm(
        "// leading comment\nOPENQASM 2.0;  // trailing\n\n  include \"qelib1.inc\";\n"
        "qreg q[2];\nrx( pi / 2 ) q[1]; // done\n");
    REQUIRE(c.size() == 1);
    CHECK(c.gates[0] == Gate::rx(1, kPi / 2));
}

TEST_CASE("errors carry line numbers") {
    auto line_of = [](const std::string& text) -> int {
        try {
            parse_qasm(text);
        } catch (const ParseError& e) {
            return e.line;
        }
        return -1;
    };
    CHECK(line_of("OPENQASM 2.0;\nqreg q[2];\nbadgate q[0];\n") == 3);
    CHECK(line_of("OPENQASM 2.0;\nqreg q[2];\n\n\nrx(pi) q[5];\n") == 5);
    CHECK(line_of("OPENQASM 2.0;\nqreg q[2];\nrx(zzz) q[0];\n") == 3);
    CHECK(line_of("OPENQASM 1.0;\nqreg q[2];\n") == 1);
}

TEST_CASE("unsupported constructs are rejected") {
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncreg c[2];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[2];\nmeasure q[0];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[2];\nbarrier q[0];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg a[2];\nqreg b[2];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nrx(pi) q[0];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncz q[0],q[0];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[2];\ninclude \"other.inc\";\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[2];\nrx(pi) q[0]\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[0];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm(""), ParseError);
    CHECK_THROWS_AS(parse_qasm("qreg q[2];\n"), ParseError);
}

}  // TEST_SUITE
