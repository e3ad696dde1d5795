#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/model.hpp"

namespace qnet {

enum class GateKind {
    ry,
    x,
    z,
    h,
    /// diag(1, e^{i angle})
    phase,
    /// -1 on the basis states where every target qubit is 0.
    phase_flip_all_zero,
    /// -1 on the basis states where every control matches; no targets.
    phase_mark,
};

std::string_view gate_name(GateKind kind);
bool has_angle(GateKind kind);

struct Control {
    int qubit = 0;
    /// 1 fires on |1>, 0 fires on |0> (open control).
    int polarity = 1;

    bool operator==(const Control &) const = default;
};

struct Gate {
    GateKind kind = GateKind::x;
    double angle = 0.0;
    std::vector<int> targets;
    std::vector<Control> controls;

    Gate inverse() const;
    Gate with_control(Control c) const;

    bool operator==(const Gate &) const = default;
};

Gate make_ry(double angle, int target, std::vector<Control> controls = {});
Gate make_x(int target, std::vector<Control> controls = {});
Gate make_z(int target, std::vector<Control> controls = {});
Gate make_h(int target);
Gate make_phase(double angle, int target, std::vector<Control> controls = {});

/// Node n at step t lives on qubit (t - 1) * nodes + n (n 0-based, t >= 1),
/// so node 1 of each register is its least significant qubit.
struct Layout {
    int nodes = 0;
    int steps = 0;

    int qubit(int node, int step) const { return (step - 1) * nodes + node; }
    int model_qubits() const { return nodes * steps; }

    bool operator==(const Layout &) const = default;
};

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    Layout layout;
    /// Phase-estimation readout qubits, least significant first.
    std::vector<int> ancillas;

    void append(const Gate &gate) { gates.push_back(gate); }
    void append(const Circuit &other);
    Circuit inverse() const;

    /// Throws unless every index is in range and targets/controls are disjoint.
    void check() const;
};

/// Marks every state whose step-`step` register satisfies `marked`.
struct GroverSpec {
    int step = 1;
    std::vector<NodeState> marked;
};

/// (qubit, polarity) pairs selecting the marked states of a register.
std::vector<Control> marked_controls(const Layout &layout, const GroverSpec &spec);

/// Proportion of basis states of the model register that the oracle marks.
double marked_fraction(const GroverSpec &spec);

double theta_init(double p_fail);
double theta_recover(double p_fail, double p_recover);

/// `active` is a bitmask over model.trigger_sources(node): bit j set means
/// the j-th source failed in the previous step.
double theta_trigger(const NetworkModel &model, int node, std::uint32_t active);

/// k * steps qubits; measuring register t reproduces the distribution at t.
Circuit build_model_circuit(const NetworkModel &model, int steps);

enum class GlobalPhase { omit, explicit_minus_one };

/// G = -U S0 U^dagger S_chi over the model register. The -1 is only
/// observable under control; explicit_minus_one appends z x z x on qubit 0.
Circuit build_grover(const NetworkModel &model, int steps, const GroverSpec &spec,
                     GlobalPhase phase = GlobalPhase::omit);

/// Appends the inverse Fourier transform on `qubits` (least significant
/// first), including the closing bit-reversal swaps.
void append_inverse_qft(Circuit &circuit, const std::vector<int> &qubits);

/// U, Hadamards on `bits` ancillas, ancilla j controlling G^(2^j), then the
/// inverse Fourier transform. Outcome y decodes as theta = 2 pi y / 2^bits.
Circuit build_qae_circuit(const NetworkModel &model, int steps, const GroverSpec &spec,
                          int bits);

/// Rewrites phase-flip-all-zero and phase-mark as x-conjugated
/// multi-controlled z gates.
Circuit lower_oracles(const Circuit &circuit);

/// One gate per line: `<kind>(<angle?>) controls=[(q,pol),...] targets=[q,...]`.
std::string emit_gates(const Circuit &circuit);

/// Inverse of emit_gates. n_qubits < 0 infers one more than the largest index.
Circuit parse_gates(std::string_view text, int n_qubits = -1);

}  // namespace qnet
