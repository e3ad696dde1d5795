#include "qnet/qae.hpp"

#include <cmath>
#include <numbers>

namespace qnet {

namespace {

// Marked and unmarked parts of the state below this weight count as absent.
constexpr double kDegenerateWeight = 1e-12;

using Amplitudes = std::vector<Amplitude>;

Amplitude inner(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    Amplitude sum{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::conj(a[i]) * b[i];
    }
    return sum;
}

Statevector from_amplitudes(int n_qubits, const Amplitudes &amps) {
    Statevector s(n_qubits);
    std::copy(amps.begin(), amps.end(), s.amplitudes().begin());
    return s;
}

double residual_norm(std::span<const Amplitude> image, Amplitude c0,
                     std::span<const Amplitude> basis0, Amplitude c1,
                     std::span<const Amplitude> basis1) {
    double sum = 0.0;
    for (std::size_t i = 0; i < image.size(); ++i) {
        sum += std::norm(image[i] - c0 * basis0[i] - c1 * basis1[i]);
    }
    return std::sqrt(sum);
}

}  // namespace

DecodedOutcome decode_outcome(std::uint64_t y, int bits) {
    if (bits < 1 || bits > 62) {
        throw Error(ErrorKind::out_of_range, "resolution must be 1..62 bits");
    }
    const std::uint64_t grid = std::uint64_t{1} << bits;
    if (y >= grid) {
        throw Error(ErrorKind::out_of_range,
                    "outcome " + std::to_string(y) + " outside 0.." + std::to_string(grid - 1));
    }
    // Fold onto y <= grid/2 so that y and grid - y decode identically.
    const std::uint64_t folded = std::min(y, grid - y);
    const double half = std::numbers::pi * static_cast<double>(folded) / static_cast<double>(grid);
    const double s = std::sin(half);
    return {2.0 * std::numbers::pi * static_cast<double>(y) / static_cast<double>(grid), s * s};
}

QaeResult run_standard_qae(const NetworkModel &model, int steps, const GroverSpec &spec,
                           int bits, std::uint64_t shots, std::uint64_t seed,
                           const SimOptions &options) {
    const Circuit circuit = build_qae_circuit(model, steps, spec, bits);
    const Statevector state = run(circuit, options);

    QaeResult result;
    result.bits = bits;
    result.outcome_distribution = marginal_distribution(state, circuit.ancillas);
    result.outcome_counts = sample_counts(state, circuit.ancillas, shots, seed);

    std::uint64_t best = 0;
    for (const auto &[y, count] : result.outcome_counts) {
        // std::map iterates ascending, so ">" keeps the smaller y on ties.
        if (count > best) {
            best = count;
            result.modal_outcome = y;
        }
    }
    const DecodedOutcome d = decode_outcome(result.modal_outcome, bits);
    result.theta = d.theta;
    result.probability = d.probability;
    return result;
}

EigenphaseResult grover_eigenphase(const NetworkModel &model, int steps,
                                   const GroverSpec &spec, const SimOptions &options) {
    const Circuit u = build_model_circuit(model, steps);
    const Circuit g = build_grover(model, steps, spec, GlobalPhase::explicit_minus_one);
    const Statevector psi = run(u, options);

    std::uint64_t mask = 0;
    std::uint64_t want = 0;
    for (const Control &c : marked_controls(u.layout, spec)) {
        mask |= std::uint64_t{1} << c.qubit;
        if (c.polarity) {
            want |= std::uint64_t{1} << c.qubit;
        }
    }

    Amplitudes good(psi.dim()), bad(psi.dim());
    double p = 0.0;
    for (std::uint64_t i = 0; i < psi.dim(); ++i) {
        if ((i & mask) == want) {
            good[i] = psi[i];
            p += std::norm(psi[i]);
        } else {
            bad[i] = psi[i];
        }
    }
    if (p < kDegenerateWeight || 1.0 - p < kDegenerateWeight) {
        throw Error(ErrorKind::degenerate_subspace,
                    "marked probability " + std::to_string(p) +
                        " leaves only trivial eigenvalues on the span");
    }
    for (auto &a : good) {
        a /= std::sqrt(p);
    }
    for (auto &a : bad) {
        a /= std::sqrt(1.0 - p);
    }

    const Statevector g_bad = run(g, from_amplitudes(u.n_qubits, bad), options);
    const Statevector g_good = run(g, from_amplitudes(u.n_qubits, good), options);

    // On the span, G = [[cos, -sin], [sin, cos]] in the (bad, good) basis.
    const Amplitude bb = inner(bad, g_bad.amplitudes());
    const Amplitude gb = inner(good, g_bad.amplitudes());
    const Amplitude bg = inner(bad, g_good.amplitudes());
    const Amplitude gg = inner(good, g_good.amplitudes());

    EigenphaseResult r;
    r.residual = std::max(residual_norm(g_bad.amplitudes(), bb, bad, gb, good),
                          residual_norm(g_good.amplitudes(), bg, bad, gg, good));
    r.theta = std::atan2(gb.real(), bb.real());
    r.lambda_plus = {std::cos(r.theta), std::sin(r.theta)};
    r.lambda_minus = std::conj(r.lambda_plus);
    const double s = std::sin(r.theta / 2.0);
    r.probability = s * s;
    return r;
}

}  // namespace qnet
