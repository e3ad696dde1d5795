#include "qnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qnet/rng.hpp"

namespace qnet {

namespace {

struct ControlMask {
    std::uint64_t mask = 0;
    std::uint64_t value = 0;

    bool fires(std::uint64_t i) const { return (i & mask) == value; }
};

ControlMask control_mask(std::span<const Control> controls) {
    ControlMask cm;
    for (const Control &c : controls) {
        const std::uint64_t bit = std::uint64_t{1} << c.qubit;
        cm.mask |= bit;
        if (c.polarity) {
            cm.value |= bit;
        }
    }
    return cm;
}

template <typename F>
void for_each_pair(Statevector &state, int target, const ControlMask &cm, F &&f) {
    auto amps = state.amplitudes();
    const std::uint64_t tbit = std::uint64_t{1} << target;
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        if ((i & tbit) == 0 && cm.fires(i)) {
            f(amps[i], amps[i | tbit]);
        }
    }
}

void check_fits(const Circuit &circuit, const SimOptions &options) {
    if (circuit.n_qubits > options.max_qubits) {
        throw Error(ErrorKind::resource_limit,
                    "circuit needs " + std::to_string(circuit.n_qubits) +
                        " qubits; simulator cap is " + std::to_string(options.max_qubits));
    }
}

}  // namespace

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 0 || n_qubits > 30) {
        throw Error(ErrorKind::resource_limit, "statevector size out of range");
    }
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

Statevector Statevector::basis(int n_qubits, std::uint64_t index) {
    Statevector s(n_qubits);
    if (index >= s.dim()) {
        throw Error(ErrorKind::out_of_range, "basis index outside register");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

double Statevector::norm_squared() const {
    double sum = 0.0;
    for (const Amplitude &a : amps_) {
        sum += std::norm(a);
    }
    return sum;
}

void apply_gate(Statevector &state, const Gate &gate) {
    const ControlMask cm = control_mask(gate.controls);
    auto amps = state.amplitudes();
    switch (gate.kind) {
        case GateKind::ry: {
            const double c = std::cos(gate.angle / 2.0);
            const double s = std::sin(gate.angle / 2.0);
            for_each_pair(state, gate.targets[0], cm, [&](Amplitude &a0, Amplitude &a1) {
                const Amplitude x0 = a0;
                a0 = c * x0 - s * a1;
                a1 = s * x0 + c * a1;
            });
            break;
        }
        case GateKind::x:
            for_each_pair(state, gate.targets[0], cm,
                          [](Amplitude &a0, Amplitude &a1) { std::swap(a0, a1); });
            break;
        case GateKind::z:
            for_each_pair(state, gate.targets[0], cm,
                          [](Amplitude &, Amplitude &a1) { a1 = -a1; });
            break;
        case GateKind::h: {
            const double r = std::numbers::sqrt2 / 2.0;
            for_each_pair(state, gate.targets[0], cm, [&](Amplitude &a0, Amplitude &a1) {
                const Amplitude x0 = a0;
                a0 = r * (x0 + a1);
                a1 = r * (x0 - a1);
            });
            break;
        }
        case GateKind::phase: {
            const Amplitude w = std::polar(1.0, gate.angle);
            for_each_pair(state, gate.targets[0], cm,
                          [&](Amplitude &, Amplitude &a1) { a1 *= w; });
            break;
        }
        case GateKind::phase_flip_all_zero: {
            std::uint64_t tmask = 0;
            for (int q : gate.targets) {
                tmask |= std::uint64_t{1} << q;
            }
            if (cm.mask == 0) {
                // Uncontrolled over the whole register: only index 0 flips.
                amps[0] = -amps[0];
                if (tmask != amps.size() - 1) {
                    for (std::uint64_t i = 1; i < amps.size(); ++i) {
                        if ((i & tmask) == 0) {
                            amps[i] = -amps[i];
                        }
                    }
                }
                break;
            }
            for (std::uint64_t i = 0; i < amps.size(); ++i) {
                if ((i & tmask) == 0 && cm.fires(i)) {
                    amps[i] = -amps[i];
                }
            }
            break;
        }
        case GateKind::phase_mark:
            for (std::uint64_t i = 0; i < amps.size(); ++i) {
                if (cm.fires(i)) {
                    amps[i] = -amps[i];
                }
            }
            break;
    }
}

Statevector run(const Circuit &circuit, const SimOptions &options) {
    check_fits(circuit, options);
    return run(circuit, Statevector(circuit.n_qubits), options);
}

Statevector run(const Circuit &circuit, Statevector initial, const SimOptions &options) {
    check_fits(circuit, options);
    if (initial.n_qubits() != circuit.n_qubits) {
        throw Error(ErrorKind::dimension_mismatch,
                    "state has " + std::to_string(initial.n_qubits()) + " qubits, circuit " +
                        std::to_string(circuit.n_qubits));
    }
    circuit.check();
    for (const Gate &g : circuit.gates) {
        apply_gate(initial, g);
    }
    return initial;
}

double marginal_probability(const Statevector &state, std::span<const int> qubits,
                            std::span<const int> bits) {
    if (qubits.size() != bits.size()) {
        throw Error(ErrorKind::dimension_mismatch, "one bit per qubit expected");
    }
    std::vector<Control> wanted;
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] < 0 || qubits[i] >= state.n_qubits()) {
            throw Error(ErrorKind::out_of_range,
                        "qubit " + std::to_string(qubits[i]) + " outside register");
        }
        const std::uint64_t bit = std::uint64_t{1} << qubits[i];
        if (seen & bit) {
            throw Error(ErrorKind::invalid_argument, "qubits must be distinct");
        }
        seen |= bit;
        wanted.push_back({qubits[i], bits[i] ? 1 : 0});
    }
    const ControlMask cm = control_mask(wanted);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
        if (cm.fires(i)) {
            sum += std::norm(state[i]);
        }
    }
    return sum;
}

std::vector<double> marginal_distribution(const Statevector &state,
                                          std::span<const int> qubits) {
    for (int q : qubits) {
        if (q < 0 || q >= state.n_qubits()) {
            throw Error(ErrorKind::out_of_range, "qubit " + std::to_string(q) +
                                                     " outside register");
        }
    }
    std::vector<double> dist(std::size_t{1} << qubits.size(), 0.0);
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
        std::uint64_t outcome = 0;
        for (std::size_t j = 0; j < qubits.size(); ++j) {
            outcome |= ((i >> qubits[j]) & 1u) << j;
        }
        dist[outcome] += std::norm(state[i]);
    }
    return dist;
}

std::map<std::uint64_t, std::uint64_t> sample_counts(const Statevector &state,
                                                     std::span<const int> qubits,
                                                     std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw Error(ErrorKind::invalid_argument, "shots must be >= 1");
    }
    const std::vector<double> dist = marginal_distribution(state, qubits);
    std::vector<double> cumulative(dist.size());
    std::partial_sum(dist.begin(), dist.end(), cumulative.begin());
    const double total = cumulative.back();

    StreamRng rng(seed, 0);
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto outcome = static_cast<std::uint64_t>(std::distance(cumulative.begin(), it));
        outcome = std::min<std::uint64_t>(outcome, dist.size() - 1);
        ++counts[outcome];
    }
    return counts;
}

Matrix extract_unitary(const Circuit &circuit) {
    if (circuit.n_qubits > kMaxUnitaryQubits) {
        throw Error(ErrorKind::resource_limit,
                    "unitary extraction limited to " + std::to_string(kMaxUnitaryQubits) +
                        " qubits");
    }
    Matrix m;
    m.dim = std::size_t{1} << circuit.n_qubits;
    m.data.assign(m.dim * m.dim, Amplitude{});
    for (std::size_t col = 0; col < m.dim; ++col) {
        const Statevector out = run(circuit, Statevector::basis(circuit.n_qubits, col));
        for (std::size_t row = 0; row < m.dim; ++row) {
            m(row, col) = out[row];
        }
    }
    return m;
}

double unitarity_defect(const Matrix &m) {
    double worst = 0.0;
    for (std::size_t r = 0; r < m.dim; ++r) {
        for (std::size_t c = 0; c < m.dim; ++c) {
            Amplitude sum{};
            for (std::size_t k = 0; k < m.dim; ++k) {
                sum += std::conj(m(k, r)) * m(k, c);
            }
            if (r == c) {
                sum -= 1.0;
            }
            worst = std::max(worst, std::abs(sum));
        }
    }
    return worst;
}

NoiseSpec NoiseSpec::from_decay_rate(double a, std::uint64_t seed) {
    if (!(a >= 0.0)) {
        throw Error(ErrorKind::out_of_range, "decay rate must be >= 0 for a noise channel");
    }
    return NoiseSpec{-std::expm1(-a), seed};
}

NoisyCounts run_noisy_lowdepth(const Circuit &model_circuit, const Circuit &grover, int ell,
                               std::uint64_t shots, const NoiseSpec &noise,
                               std::span<const Control> marked, const SimOptions &options) {
    if (ell < 0) {
        throw Error(ErrorKind::out_of_range, "Grover power must be >= 0");
    }
    if (shots == 0) {
        throw Error(ErrorKind::invalid_argument, "shots must be >= 1");
    }
    if (!(noise.per_grover_error >= 0.0 && noise.per_grover_error <= 1.0)) {
        throw Error(ErrorKind::out_of_range, "per-Grover error must lie in [0,1]");
    }
    if (grover.n_qubits != model_circuit.n_qubits) {
        throw Error(ErrorKind::dimension_mismatch, "Grover and model registers differ");
    }

    Statevector state = run(model_circuit, options);
    for (int i = 0; i < ell; ++i) {
        state = run(grover, std::move(state), options);
    }

    std::vector<double> cumulative(state.dim());
    double acc = 0.0;
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
        acc += std::norm(state[i]);
        cumulative[i] = acc;
    }
    const ControlMask cm = control_mask(marked);
    const double survive = std::pow(1.0 - noise.per_grover_error, ell);

    // One stream per Grover power so schedules can be extended without
    // disturbing earlier entries.
    StreamRng rng(noise.seed, static_cast<std::uint64_t>(ell));
    NoisyCounts counts;
    counts.shots = shots;
    for (std::uint64_t s = 0; s < shots; ++s) {
        std::uint64_t outcome;
        if (rng.bernoulli(survive)) {
            const double u = rng.uniform() * acc;
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            outcome = std::min<std::uint64_t>(
                static_cast<std::uint64_t>(std::distance(cumulative.begin(), it)),
                state.dim() - 1);
        } else {
            outcome = rng.below(state.dim());
            ++counts.scrambled;
        }
        if (cm.fires(outcome)) {
            ++counts.marked;
        }
    }
    return counts;
}

}  // namespace qnet
