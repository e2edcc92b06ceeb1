#include "qcopt/qasm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace qcopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Statement {
    std::string text;  // without the trailing ';', comments stripped
    int line;          // 1-based line of the first token
};

std::vector<Statement> split_statements(std::string_view text) {
    std::vector<Statement> out;
    std::string cur;
    int line = 1, start_line = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (ch == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') ++i;
            --i;
            continue;
        }
        if (ch == '\n') ++line;
        if (ch == ';') {
            out.push_back({cur, start_line == 0 ? line : start_line});
            cur.clear();
            start_line = 0;
        } else {
            if (!std::isspace(static_cast<unsigned char>(ch)) && start_line == 0) start_line = line;
            cur.push_back(ch == '\n' || ch == '\t' ? ' ' : ch);
        }
    }
    for (char ch : cur)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            throw ParseError(start_line, "statement missing trailing ';'");
    return out;
}

struct Cursor {
    std::string_view s;
    size_t pos = 0;
    int line;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!eat(c)) throw ParseError(line, std::string("expected '") + c + "' " + what);
    }
    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (pos == start) throw ParseError(line, "expected identifier");
        return std::string(s.substr(start, pos - start));
    }
    long integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError(line, "expected integer");
        return std::strtol(std::string(s.substr(start, pos - start)).c_str(), nullptr, 10);
    }
    /// Text up to the matching ')' at depth 0 (no nesting in this grammar).
    std::string until_close_paren() {
        size_t start = pos;
        while (pos < s.size() && s[pos] != ')') ++pos;
        if (pos >= s.size()) throw ParseError(line, "unterminated '('");
        return std::string(s.substr(start, pos - start));
    }
};

struct AngleCursor {
    std::string_view s;
    size_t pos = 0;
    int line;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool eat_pi() {
        skip_ws();
        if (s.substr(pos, 2) == "pi") {
            pos += 2;
            return true;
        }
        return false;
    }
    double number() {
        skip_ws();
        const std::string rest(s.substr(pos));
        char* end = nullptr;
        double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str() || !std::isfinite(v))
            throw ParseError(line, "malformed angle expression: expected number");
        pos += static_cast<size_t>(end - rest.c_str());
        return v;
    }
};

}  // namespace

double parse_angle_expr(std::string_view expr, int line) {
    AngleCursor c{expr, 0, line};
    double sign = 1.0;
    if (c.eat('-'))
        sign = -1.0;
    else
        c.eat('+');

    double v;
    if (c.eat_pi()) {
        v = kPi;
    } else {
        v = c.number();
        if (c.eat('*')) {
            if (!c.eat_pi()) throw ParseError(line, "malformed angle expression: expected 'pi'");
            v *= kPi;
        }
    }
    if (c.eat('/')) {
        double d = c.number();
        if (d == 0.0) throw ParseError(line, "division by zero in angle expression");
        v /= d;
    }
    c.skip_ws();
    if (c.pos != expr.size())
        throw ParseError(line, "malformed angle expression: trailing characters");
    return sign * v;
}

namespace {

struct Builder {
    std::vector<Gate>& gates;
    int line;

    void h(int q) {
        gates.push_back(Gate::rz(q, kPi / 2));
        gates.push_back(Gate::rx(q, kPi / 2));
        gates.push_back(Gate::rz(q, kPi / 2));
    }
    void cx(int ctl, int tgt) {
        h(tgt);
        gates.push_back(Gate::cz(ctl, tgt));
        h(tgt);
    }
    void ccx(int a, int b, int c) {
        // Standard 6-CX Toffoli.
        h(c);
        cx(b, c);
        gates.push_back(Gate::rz(c, -kPi / 4));
        cx(a, c);
        gates.push_back(Gate::rz(c, kPi / 4));
        cx(b, c);
        gates.push_back(Gate::rz(c, -kPi / 4));
        cx(a, c);
        gates.push_back(Gate::rz(b, kPi / 4));
        gates.push_back(Gate::rz(c, kPi / 4));
        h(c);
        cx(a, b);
        gates.push_back(Gate::rz(a, kPi / 4));
        gates.push_back(Gate::rz(b, -kPi / 4));
        cx(a, b);
    }

    void emit(const std::string& name, const std::vector<double>& params,
              const std::vector<int>& q) {
        auto want = [&](size_t np, size_t nq) {
            if (params.size() != np)
                throw ParseError(line, name + ": expected " + std::to_string(np) +
                                           " parameter(s), got " + std::to_string(params.size()));
            if (q.size() != nq)
                throw ParseError(line, name + ": expected " + std::to_string(nq) +
                                           " operand(s), got " + std::to_string(q.size()));
        };
        auto distinct2 = [&] {
            if (q[0] == q[1]) throw ParseError(line, name + ": identical operands");
        };
        if (name == "rx" || name == "ry" || name == "rz") {
            want(1, 1);
            GateKind k = name == "rx"   ? GateKind::RX
                         : name == "ry" ? GateKind::RY
                                        : GateKind::RZ;
            gates.push_back({k, q[0], -1, params[0]});
        } else if (name == "rxx") {
            want(1, 2);
            distinct2();
            gates.push_back(Gate::rxx(q[0], q[1], params[0]));
        } else if (name == "cz") {
            want(0, 2);
            distinct2();
            gates.push_back(Gate::cz(q[0], q[1]));
        } else if (name == "cx") {
            want(0, 2);
            distinct2();
            cx(q[0], q[1]);
        } else if (name == "ccx") {
            want(0, 3);
            if (q[0] == q[1] || q[0] == q[2] || q[1] == q[2])
                throw ParseError(line, "ccx: identical operands");
            ccx(q[0], q[1], q[2]);
        } else if (name == "h") {
            want(0, 1);
            h(q[0]);
        } else if (name == "x") {
            want(0, 1);
            gates.push_back(Gate::rx(q[0], kPi));
        } else if (name == "z") {
            want(0, 1);
            gates.push_back(Gate::rz(q[0], kPi));
        } else if (name == "s") {
            want(0, 1);
            gates.push_back(Gate::rz(q[0], kPi / 2));
        } else if (name == "sdg") {
            want(0, 1);
            gates.push_back(Gate::rz(q[0], -kPi / 2));
        } else if (name == "t") {
            want(0, 1);
            gates.push_back(Gate::rz(q[0], kPi / 4));
        } else if (name == "tdg") {
            want(0, 1);
            gates.push_back(Gate::rz(q[0], -kPi / 4));
        } else if (name == "measure" || name == "barrier" || name == "reset" || name == "if") {
            throw ParseError(line, name + " is not supported");
        } else {
            throw ParseError(line, "unknown gate: " + name);
        }
    }
};

}  // namespace

Circuit parse_qasm(std::string_view text) {
    auto statements = split_statements(text);
    if (statements.empty()) throw ParseError(1, "empty document");

    Circuit circuit;
    std::string reg_name;
    bool saw_version = false, saw_reg = false;

    for (size_t si = 0; si < statements.size(); ++si) {
        Cursor cur{statements[si].text, 0, statements[si].line};
        if (cur.done()) continue;

        if (!saw_version) {
            std::string kw = cur.ident();
            if (kw != "OPENQASM") throw ParseError(cur.line, "expected OPENQASM 2.0 header");
            cur.skip_ws();
            std::string ver;
            while (cur.pos < cur.s.size() &&
                   !std::isspace(static_cast<unsigned char>(cur.s[cur.pos])))
                ver.push_back(cur.s[cur.pos++]);
            if (ver != "2.0") throw ParseError(cur.line, "unsupported OPENQASM version " + ver);
            saw_version = true;
            continue;
        }

        size_t mark = cur.pos;
        std::string head = cur.ident();

        if (head == "include") {
            cur.skip_ws();
            std::string rest(cur.s.substr(cur.pos));
            while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back())))
                rest.pop_back();
            if (rest != "\"qelib1.inc\"")
                throw ParseError(cur.line, "only include \"qelib1.inc\" is supported");
            continue;
        }
        if (head == "creg")
            throw ParseError(cur.line, "classical registers are not supported");
        if (head == "gate" || head == "opaque")
            throw ParseError(cur.line, "custom gate definitions are not supported");
        if (head == "qreg") {
            if (saw_reg) throw ParseError(cur.line, "multiple quantum registers");
            reg_name = cur.ident();
            cur.expect('[', "after register name");
            long n = cur.integer();
            cur.expect(']', "after register size");
            if (!cur.done()) throw ParseError(cur.line, "trailing characters after qreg");
            if (n < 1) throw ParseError(cur.line, "register must have at least one qubit");
            circuit.width = static_cast<int>(n);
            saw_reg = true;
            continue;
        }

        // Gate application.
        if (!saw_reg) throw ParseError(cur.line, "gate before qreg declaration");
        cur.pos = mark;
        std::string name = cur.ident();
        std::vector<double> params;
        if (cur.eat('(')) {
            std::string expr = cur.until_close_paren();
            cur.expect(')', "after gate parameter");
            params.push_back(parse_angle_expr(expr, cur.line));
        }
        std::vector<int> operands;
        do {
            std::string rn = cur.ident();
            if (rn != reg_name) throw ParseError(cur.line, "unknown register: " + rn);
            cur.expect('[', "in operand");
            long idx = cur.integer();
            cur.expect(']', "in operand");
            if (idx < 0 || idx >= circuit.width)
                throw ParseError(cur.line, "qubit index " + std::to_string(idx) +
                                               " out of range for register of size " +
                                               std::to_string(circuit.width));
            operands.push_back(static_cast<int>(idx));
        } while (cur.eat(','));
        if (!cur.done()) throw ParseError(cur.line, "trailing characters after gate");

        Builder b{circuit.gates, cur.line};
        b.emit(name, params, operands);
    }

    if (!saw_version) throw ParseError(1, "expected OPENQASM 2.0 header");
    if (!saw_reg) throw ParseError(1, "missing qreg declaration");
    return circuit;
}

std::string emit_qasm(const Circuit& c) {
    if (c.width < 1) throw ConfigError("emit_qasm: circuit must have at least one qubit");
    c.validate();
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" +
                      std::to_string(c.width) + "];\n";
    char buf[64];
    for (const Gate& g : c.gates) {
        out += kind_name(g.kind);
        if (parameterized(g.kind)) {
            std::snprintf(buf, sizeof buf, "(%.17g)", g.angle);
            out += buf;
        }
        out += " q[" + std::to_string(g.q0) + "]";
        if (g.q1 >= 0) out += ",q[" + std::to_string(g.q1) + "]";
        out += ";\n";
    }
    return out;
}

}  // namespace qcopt
