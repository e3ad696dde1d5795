#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "qnet/circuit.hpp"
#include "qnet/sim.hpp"

namespace qnet {

struct DecodedOutcome {
    double theta = 0.0;
    double probability = 0.0;
};

/// theta = 2 pi y / 2^bits, probability = sin^2(theta / 2).
DecodedOutcome decode_outcome(std::uint64_t y, int bits);

struct QaeResult {
    int bits = 0;
    std::map<std::uint64_t, std::uint64_t> outcome_counts;
    /// Noiseless readout distribution of the ancilla register.
    std::vector<double> outcome_distribution;
    /// Most frequent outcome; ties go to the smaller y.
    std::uint64_t modal_outcome = 0;
    double theta = 0.0;
    double probability = 0.0;
};

/// Phase estimation of the Grover operator with `bits` readout qubits.
QaeResult run_standard_qae(const NetworkModel &model, int steps, const GroverSpec &spec,
                           int bits, std::uint64_t shots, std::uint64_t seed,
                           const SimOptions &options = {});

struct EigenphaseResult {
    double theta = 0.0;
    std::complex<double> lambda_plus;
    std::complex<double> lambda_minus;
    double probability = 0.0;
    /// Distance of G applied to the span basis from the span itself.
    double residual = 0.0;
};

/// Reads the rotation angle of G on span{marked, unmarked part of U|0>}.
/// Throws degenerate_subspace when either part vanishes (p = 0 or 1).
EigenphaseResult grover_eigenphase(const NetworkModel &model, int steps,
                                   const GroverSpec &spec, const SimOptions &options = {});

}  // namespace qnet
