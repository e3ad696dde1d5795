#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qnet/circuit.hpp"

namespace qnet {

using Amplitude = std::complex<double>;

/// Dense state of n qubits; qubit q is bit q of the basis index.
class Statevector {
  public:
    Statevector() = default;
    /// |0...0> on n qubits.
    explicit Statevector(int n_qubits);
    static Statevector basis(int n_qubits, std::uint64_t index);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<Amplitude> amplitudes() { return amps_; }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    Amplitude operator[](std::uint64_t i) const { return amps_[i]; }

    double norm_squared() const;

  private:
    int n_qubits_ = 0;
    std::vector<Amplitude> amps_;
};

struct SimOptions {
    /// 2^20 amplitudes are 16 MiB.
    int max_qubits = 20;
};

/// Applies one gate in place. Gate indices must fit the state.
void apply_gate(Statevector &state, const Gate &gate);

Statevector run(const Circuit &circuit, const SimOptions &options = {});
Statevector run(const Circuit &circuit, Statevector initial, const SimOptions &options = {});

/// Sum of |amplitude|^2 over basis states with qubits[i] == bits[i] for all i.
double marginal_probability(const Statevector &state, std::span<const int> qubits,
                            std::span<const int> bits);

/// Distribution over the listed qubits; outcome bit i is qubits[i].
std::vector<double> marginal_distribution(const Statevector &state, std::span<const int> qubits);

/// Multinomial sample of the listed qubits; keys use the same bit order as
/// marginal_distribution.
std::map<std::uint64_t, std::uint64_t> sample_counts(const Statevector &state,
                                                     std::span<const int> qubits,
                                                     std::uint64_t shots, std::uint64_t seed);

/// Row-major dense matrix.
struct Matrix {
    std::size_t dim = 0;
    std::vector<Amplitude> data;

    Amplitude &operator()(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    Amplitude operator()(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

inline constexpr int kMaxUnitaryQubits = 10;

/// Column j is the circuit applied to basis state j.
Matrix extract_unitary(const Circuit &circuit);

/// Largest |(M^dagger M - I)_{rc}|.
double unitarity_defect(const Matrix &m);

/// Phenomenological Grover-level noise: every Grover application
/// independently scrambles the run with probability per_grover_error. For a
/// decay rate a, per_grover_error = 1 - exp(-a).
struct NoiseSpec {
    double per_grover_error = 0.0;
    std::uint64_t seed = 0;

    static NoiseSpec from_decay_rate(double a, std::uint64_t seed);
};

struct NoisyCounts {
    std::uint64_t shots = 0;
    std::uint64_t marked = 0;
    /// Shots whose outcome was replaced by a uniformly random basis state.
    std::uint64_t scrambled = 0;
};

/// Runs U G^ell shot by shot. A shot survives with probability
/// (1 - eps)^ell and is then drawn from the noiseless distribution;
/// otherwise it is uniform over all basis states of the register. A shot is
/// marked when every (qubit, polarity) in `marked` matches.
NoisyCounts run_noisy_lowdepth(const Circuit &model_circuit, const Circuit &grover, int ell,
                               std::uint64_t shots, const NoiseSpec &noise,
                               std::span<const Control> marked, const SimOptions &options = {});

}  // namespace qnet
