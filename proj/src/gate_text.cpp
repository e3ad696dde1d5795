#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <regex>
#include <sstream>

#include "qnet/circuit.hpp"

namespace qnet {

namespace {

// Six decimals when that is exact, otherwise enough digits to round-trip.
std::string format_angle(double angle) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", angle);
    if (std::strtod(buf, nullptr) == angle) {
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", angle);
    return buf;
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string &what) {
    throw Error(ErrorKind::parse_error,
                "gate list line " + std::to_string(line_no) + ": " + what);
}

int parse_index(std::string_view text, std::size_t line_no) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
        bad_line(line_no, "bad qubit index '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

std::string emit_gates(const Circuit &circuit) {
    std::ostringstream out;
    for (const Gate &g : circuit.gates) {
        out << gate_name(g.kind) << '(';
        if (has_angle(g.kind)) {
            out << format_angle(g.angle);
        }
        out << ") controls=[";
        for (std::size_t i = 0; i < g.controls.size(); ++i) {
            out << (i ? "," : "") << '(' << g.controls[i].qubit << ',' << g.controls[i].polarity
                << ')';
        }
        out << "] targets=[";
        for (std::size_t i = 0; i < g.targets.size(); ++i) {
            out << (i ? "," : "") << g.targets[i];
        }
        out << "]\n";
    }
    return out.str();
}

Circuit parse_gates(std::string_view text, int n_qubits) {
    static const std::regex line_re(
        R"(^([a-z-]+)\(([^)]*)\) controls=\[([^\]]*)\] targets=\[([^\]]*)\]$)");
    static const std::regex control_re(R"(\((\d+),([01])\))");

    Circuit circuit;
    int max_index = -1;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::smatch m;
        if (!std::regex_match(line, m, line_re)) {
            bad_line(line_no, "does not match '<kind>(<angle>) controls=[...] targets=[...]'");
        }

        Gate g;
        const std::string name = m[1];
        bool known = false;
        for (GateKind kind : {GateKind::ry, GateKind::x, GateKind::z, GateKind::h,
                              GateKind::phase, GateKind::phase_flip_all_zero,
                              GateKind::phase_mark}) {
            if (gate_name(kind) == name) {
                g.kind = kind;
                known = true;
            }
        }
        if (!known) {
            bad_line(line_no, "unknown gate '" + name + "'");
        }

        const std::string angle = m[2];
        if (has_angle(g.kind)) {
            char *end = nullptr;
            g.angle = std::strtod(angle.c_str(), &end);
            if (angle.empty() || end != angle.c_str() + angle.size()) {
                bad_line(line_no, "bad angle '" + angle + "'");
            }
        } else if (!angle.empty()) {
            bad_line(line_no, "gate '" + name + "' takes no angle");
        }

        const std::string controls = m[3];
        std::string rest = controls;
        for (std::sregex_iterator it(controls.begin(), controls.end(), control_re), end;
             it != end; ++it) {
            const Control c{parse_index((*it)[1].str(), line_no), (*it)[2].str() == "1" ? 1 : 0};
            g.controls.push_back(c);
            max_index = std::max(max_index, c.qubit);
        }
        // Anything left after removing the (q,pol) groups must be separators.
        rest = std::regex_replace(controls, control_re, "");
        if (rest.find_first_not_of(',') != std::string::npos) {
            bad_line(line_no, "malformed control list");
        }

        std::istringstream targets(m[4].str());
        std::string item;
        while (std::getline(targets, item, ',')) {
            const int q = parse_index(item, line_no);
            g.targets.push_back(q);
            max_index = std::max(max_index, q);
        }
        circuit.gates.push_back(std::move(g));
    }
    circuit.n_qubits = n_qubits >= 0 ? n_qubits : max_index + 1;
    circuit.check();
    return circuit;
}

}  // namespace qnet
