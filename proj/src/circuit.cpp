#include "qnet/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace qnet {

namespace {

void check_probability(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::out_of_range, std::string(what) + " must lie in [0,1]");
    }
}

// Largest trigger-ancestor set for which every configuration gets its own gate.
constexpr std::size_t kMaxTriggerSources = 20;

}  // namespace

std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::ry:
            return "ry";
        case GateKind::x:
            return "x";
        case GateKind::z:
            return "z";
        case GateKind::h:
            return "h";
        case GateKind::phase:
            return "p";
        case GateKind::phase_flip_all_zero:
            return "phase-flip-all-zero";
        case GateKind::phase_mark:
            return "phase-mark";
    }
    return "?";
}

bool has_angle(GateKind kind) { return kind == GateKind::ry || kind == GateKind::phase; }

Gate Gate::inverse() const {
    Gate g = *this;
    if (has_angle(kind)) {
        g.angle = -angle;
    }
    return g;
}

Gate Gate::with_control(Control c) const {
    Gate g = *this;
    g.controls.push_back(c);
    return g;
}

Gate make_ry(double angle, int target, std::vector<Control> controls) {
    return Gate{GateKind::ry, angle, {target}, std::move(controls)};
}

Gate make_x(int target, std::vector<Control> controls) {
    return Gate{GateKind::x, 0.0, {target}, std::move(controls)};
}

Gate make_z(int target, std::vector<Control> controls) {
    return Gate{GateKind::z, 0.0, {target}, std::move(controls)};
}

Gate make_h(int target) { return Gate{GateKind::h, 0.0, {target}, {}}; }

Gate make_phase(double angle, int target, std::vector<Control> controls) {
    return Gate{GateKind::phase, angle, {target}, std::move(controls)};
}

void Circuit::append(const Circuit &other) {
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

Circuit Circuit::inverse() const {
    Circuit out = *this;
    out.gates.clear();
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        out.gates.push_back(it->inverse());
    }
    return out;
}

void Circuit::check() const {
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const Gate &g = gates[i];
        const std::string where = "gate " + std::to_string(i + 1);
        std::set<int> used;
        auto use = [&](int q) {
            if (q < 0 || q >= n_qubits) {
                throw Error(ErrorKind::out_of_range, where + ": qubit " + std::to_string(q) +
                                                         " outside register of " +
                                                         std::to_string(n_qubits));
            }
            if (!used.insert(q).second) {
                throw Error(ErrorKind::invalid_argument,
                            where + ": qubit " + std::to_string(q) + " used twice");
            }
        };
        for (int q : g.targets) {
            use(q);
        }
        for (const Control &c : g.controls) {
            use(c.qubit);
            if (c.polarity != 0 && c.polarity != 1) {
                throw Error(ErrorKind::invalid_argument, where + ": polarity must be 0 or 1");
            }
        }
        const bool single_target = g.kind != GateKind::phase_flip_all_zero &&
                                   g.kind != GateKind::phase_mark;
        if (single_target && g.targets.size() != 1) {
            throw Error(ErrorKind::invalid_argument, where + ": expects exactly one target");
        }
        if (g.kind == GateKind::phase_mark && !g.targets.empty()) {
            throw Error(ErrorKind::invalid_argument, where + ": phase-mark takes no targets");
        }
        if (!std::isfinite(g.angle)) {
            throw Error(ErrorKind::invalid_argument, where + ": angle is not finite");
        }
    }
}

std::vector<Control> marked_controls(const Layout &layout, const GroverSpec &spec) {
    std::vector<Control> out;
    for (const NodeState &s : spec.marked) {
        out.push_back({layout.qubit(s.node, spec.step), s.failed ? 1 : 0});
    }
    return out;
}

double marked_fraction(const GroverSpec &spec) {
    return std::ldexp(1.0, -static_cast<int>(spec.marked.size()));
}

double theta_init(double p_fail) {
    check_probability(p_fail, "p_fail");
    return 2.0 * std::asin(std::sqrt(p_fail));
}

double theta_recover(double p_fail, double p_recover) {
    check_probability(p_recover, "p_recover");
    return 2.0 * std::asin(std::sqrt(1.0 - p_recover)) - theta_init(p_fail);
}

double theta_trigger(const NetworkModel &model, int node, std::uint32_t active) {
    check_node(model, node);
    const std::vector<int> sources = model.trigger_sources(node);
    double stay_good = 1.0 - model.p_fail[node];
    for (std::size_t j = 0; j < sources.size(); ++j) {
        if (active & (1u << j)) {
            stay_good *= 1.0 - model.p_trigger[sources[j]][node];
        }
    }
    return 2.0 * std::asin(std::sqrt(1.0 - stay_good)) - theta_init(model.p_fail[node]);
}

Circuit build_model_circuit(const NetworkModel &model, int steps) {
    validate(model);
    if (steps < 1) {
        throw Error(ErrorKind::out_of_range, "model circuit needs at least one step");
    }
    const int k = model.size();
    Circuit c;
    c.layout = Layout{k, steps};
    c.n_qubits = c.layout.model_qubits();

    // Every register starts from the intrinsic failure rotation.
    for (int t = 1; t <= steps; ++t) {
        for (int n = 0; n < k; ++n) {
            c.append(make_ry(theta_init(model.p_fail[n]), c.layout.qubit(n, t)));
        }
    }

    for (int t = 1; t < steps; ++t) {
        for (int n = 0; n < k; ++n) {
            const int prev = c.layout.qubit(n, t);
            const int next = c.layout.qubit(n, t + 1);
            c.append(make_ry(theta_recover(model.p_fail[n], model.p_recover[n]), next,
                             {{prev, 1}}));

            const std::vector<int> sources = model.trigger_sources(n);
            if (sources.size() > kMaxTriggerSources) {
                throw Error(ErrorKind::resource_limit,
                            "node " + std::to_string(n + 1) + " has more than " +
                                std::to_string(kMaxTriggerSources) + " trigger sources");
            }
            // The all-inactive configuration has angle 0 and is skipped.
            for (std::uint32_t active = 1; active < (1u << sources.size()); ++active) {
                std::vector<Control> controls{{prev, 0}};
                for (std::size_t j = 0; j < sources.size(); ++j) {
                    controls.push_back(
                        {c.layout.qubit(sources[j], t), (active >> j) & 1u ? 1 : 0});
                }
                c.append(make_ry(theta_trigger(model, n, active), next, std::move(controls)));
            }
        }
    }
    return c;
}

Circuit build_grover(const NetworkModel &model, int steps, const GroverSpec &spec,
                     GlobalPhase phase) {
    Circuit u = build_model_circuit(model, steps);
    if (spec.step < 1 || spec.step > steps) {
        throw Error(ErrorKind::out_of_range, "marked step " + std::to_string(spec.step) +
                                                 " outside 1.." + std::to_string(steps));
    }
    if (spec.marked.empty()) {
        throw Error(ErrorKind::invalid_argument, "oracle marks no node");
    }

    std::set<int> seen;
    for (const NodeState &s : spec.marked) {
        check_node(model, s.node);
        if (!seen.insert(s.node).second) {
            throw Error(ErrorKind::invalid_argument,
                        "node " + std::to_string(s.node + 1) + " marked twice");
        }
    }
    const Gate mark{GateKind::phase_mark, 0.0, {}, marked_controls(u.layout, spec)};

    Gate reflect_zero{GateKind::phase_flip_all_zero, 0.0, {}, {}};
    for (int q = 0; q < u.n_qubits; ++q) {
        reflect_zero.targets.push_back(q);
    }

    Circuit g;
    g.n_qubits = u.n_qubits;
    g.layout = u.layout;
    g.append(mark);
    g.append(u.inverse());
    g.append(reflect_zero);
    g.append(u);
    if (phase == GlobalPhase::explicit_minus_one) {
        // z x z x = -1
        g.append(make_z(0));
        g.append(make_x(0));
        g.append(make_z(0));
        g.append(make_x(0));
    }
    return g;
}

void append_inverse_qft(Circuit &circuit, const std::vector<int> &qubits) {
    const int b = static_cast<int>(qubits.size());
    // After round i the qubit qubits[b-1-i] holds bit i of the outcome.
    for (int i = 0; i < b; ++i) {
        const int target = qubits[b - 1 - i];
        for (int m = 0; m < i; ++m) {
            const double angle = -std::numbers::pi / std::ldexp(1.0, i - m);
            circuit.append(make_phase(angle, target, {{qubits[b - 1 - m], 1}}));
        }
        circuit.append(make_h(target));
    }
    for (int j = 0; j < b / 2; ++j) {
        const int lo = qubits[j];
        const int hi = qubits[b - 1 - j];
        circuit.append(make_x(lo, {{hi, 1}}));
        circuit.append(make_x(hi, {{lo, 1}}));
        circuit.append(make_x(lo, {{hi, 1}}));
    }
}

Circuit build_qae_circuit(const NetworkModel &model, int steps, const GroverSpec &spec,
                          int bits) {
    if (bits < 1) {
        throw Error(ErrorKind::out_of_range, "QAE needs at least one readout qubit");
    }
    if (bits > 16) {
        throw Error(ErrorKind::resource_limit, "QAE resolution limited to 16 bits");
    }
    const Circuit u = build_model_circuit(model, steps);
    const Circuit g = build_grover(model, steps, spec, GlobalPhase::explicit_minus_one);

    Circuit c;
    c.layout = u.layout;
    c.n_qubits = u.n_qubits + bits;
    for (int j = 0; j < bits; ++j) {
        c.ancillas.push_back(u.n_qubits + j);
    }
    c.append(u);
    for (int a : c.ancillas) {
        c.append(make_h(a));
    }
    for (int j = 0; j < bits; ++j) {
        const Control ctrl{c.ancillas[j], 1};
        const std::uint64_t reps = std::uint64_t{1} << j;
        for (std::uint64_t r = 0; r < reps; ++r) {
            for (const Gate &gate : g.gates) {
                c.append(gate.with_control(ctrl));
            }
        }
    }
    append_inverse_qft(c, c.ancillas);
    return c;
}

Circuit lower_oracles(const Circuit &circuit) {
    Circuit out = circuit;
    out.gates.clear();
    for (const Gate &g : circuit.gates) {
        if (g.kind == GateKind::phase_flip_all_zero && !g.targets.empty()) {
            for (int q : g.targets) {
                out.append(make_x(q));
            }
            std::vector<Control> controls = g.controls;
            for (std::size_t i = 0; i + 1 < g.targets.size(); ++i) {
                controls.push_back({g.targets[i], 1});
            }
            out.append(make_z(g.targets.back(), std::move(controls)));
            for (int q : g.targets) {
                out.append(make_x(q));
            }
        } else if (g.kind == GateKind::phase_mark && !g.controls.empty()) {
            std::vector<int> flipped;
            for (const Control &c : g.controls) {
                if (c.polarity == 0) {
                    flipped.push_back(c.qubit);
                }
            }
            for (int q : flipped) {
                out.append(make_x(q));
            }
            std::vector<Control> controls;
            for (std::size_t i = 0; i + 1 < g.controls.size(); ++i) {
                controls.push_back({g.controls[i].qubit, 1});
            }
            out.append(make_z(g.controls.back().qubit, std::move(controls)));
            for (int q : flipped) {
                out.append(make_x(q));
            }
        } else {
            out.append(g);
        }
    }
    return out;
}

}  // namespace qnet
