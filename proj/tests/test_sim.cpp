#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qnet/circuit.hpp"
#include "qnet/exact.hpp"
#include "qnet/lowdepth.hpp"
#include "qnet/sim.hpp"
#include "support.hpp"

using namespace qnet;

namespace {

Matrix multiply(const Matrix &a, const Matrix &b) {
    Matrix c{a.dim, std::vector<Amplitude>(a.dim * a.dim)};
    for (std::size_t r = 0; r < a.dim; ++r)
        for (std::size_t k = 0; k < a.dim; ++k)
            for (std::size_t col = 0; col < a.dim; ++col) c(r, col) += a(r, k) * b(k, col);
    return c;
}

Matrix adjoint(const Matrix &a) {
    Matrix c{a.dim, std::vector<Amplitude>(a.dim * a.dim)};
    for (std::size_t r = 0; r < a.dim; ++r)
        for (std::size_t col = 0; col < a.dim; ++col) c(r, col) = std::conj(a(col, r));
    return c;
}

Matrix diagonal(std::size_t dim, auto sign) {
    Matrix m{dim, std::vector<Amplitude>(dim * dim)};
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = sign(i);
    return m;
}

double max_distance(const Matrix &a, const Matrix &b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) d = std::max(d, std::abs(a.data[i] - b.data[i]));
    return d;
}

Circuit random_circuit(int n, int gates, std::mt19937_64 &gen) {
    std::uniform_int_distribution<int> q(0, n - 1), kind(0, 6);
    std::uniform_real_distribution<double> angle(-4.0, 4.0);
    Circuit c;
    c.n_qubits = n;
    for (int i = 0; i < gates; ++i) {
        const int t = q(gen);
        int ctl = q(gen);
        std::vector<Control> controls;
        if (ctl != t) controls.push_back({ctl, static_cast<int>(gen() & 1)});
        switch (kind(gen)) {
            case 0: c.append(make_ry(angle(gen), t, controls)); break;
            case 1: c.append(make_x(t, controls)); break;
            case 2: c.append(make_z(t, controls)); break;
            case 3: c.append(make_h(t)); break;
            case 4: c.append(make_phase(angle(gen), t, controls)); break;
            case 5: c.append(Gate{GateKind::phase_flip_all_zero, 0.0, {t}, controls}); break;
            default: c.append(Gate{GateKind::phase_mark, 0.0, {}, {{t, static_cast<int>(gen() & 1)}}});
        }
    }
    return c;
}

}  // namespace

TEST_CASE("single-qubit kernels") {
    Circuit c;
    c.n_qubits = 2;
    c.append(make_ry(1.0, 1));
    Statevector s = run(c);
    CHECK(std::abs(s[0] - std::cos(0.5)) < 1e-15);
    CHECK(std::abs(s[2] - std::sin(0.5)) < 1e-15);

    // Open control fires on |0>.
    Circuit d;
    d.n_qubits = 2;
    d.append(make_x(1, {{0, 0}}));
    CHECK(std::abs(run(d)[2] - 1.0) < 1e-15);
    Circuit e;
    e.n_qubits = 2;
    e.append(make_x(1, {{0, 1}}));
    CHECK(std::abs(run(e)[0] - 1.0) < 1e-15);

    Circuit h;
    h.n_qubits = 1;
    h.append(make_h(0));
    h.append(make_phase(std::numbers::pi / 2, 0));
    Statevector t = run(h);
    CHECK(std::abs(t[1] - Amplitude(0, 1) / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("oracle gates flip the expected signs") {
    Circuit c;
    c.n_qubits = 3;
    c.append(Gate{GateKind::phase_flip_all_zero, 0.0, {0, 2}, {}});
    c.append(Gate{GateKind::phase_mark, 0.0, {}, {{1, 1}, {2, 0}}});
    const Matrix u = extract_unitary(c);
    for (std::size_t i = 0; i < 8; ++i) {
        double sign = 1.0;
        if ((i & 0b101) == 0) sign = -sign;
        if ((i & 0b110) == 0b010) sign = -sign;
        CHECK(std::abs(u(i, i) - sign) < 1e-15);
    }
}

TEST_CASE("random circuits preserve the norm and are unitary") {
    std::mt19937_64 gen(1);
    for (int i = 0; i < 20; ++i) {
        const Circuit c = random_circuit(4, 60, gen);
        CHECK(std::abs(run(c).norm_squared() - 1.0) < 1e-12);
        CHECK(unitarity_defect(extract_unitary(c)) < 1e-9);
        const Matrix back = extract_unitary([&] {
            Circuit both = c;
            both.append(c.inverse());
            return both;
        }());
        CHECK(max_distance(back, diagonal(16, [](std::size_t) { return 1.0; })) < 1e-12);
    }
}

TEST_CASE("model, grover and qae circuits are unitary") {
    const NetworkModel m = testsupport::two_node_model();
    const GroverSpec spec{2, parse_selection("11", 2)};
    CHECK(unitarity_defect(extract_unitary(build_model_circuit(m, 3))) < 1e-9);
    CHECK(unitarity_defect(extract_unitary(build_grover(m, 3, {3, spec.marked}))) < 1e-9);
    CHECK(unitarity_defect(extract_unitary(build_qae_circuit(m, 2, spec, 3))) < 1e-9);
    CHECK(unitarity_defect(extract_unitary(lower_oracles(build_qae_circuit(m, 2, spec, 2)))) <
          1e-9);
}

TEST_CASE("lowered oracles implement the same unitary") {
    const NetworkModel m = testsupport::two_node_model();
    for (const char *sel : {"00", "01", "1x", "x0"}) {
        const GroverSpec spec{2, parse_selection(sel, 2)};
        const Circuit g = build_grover(m, 2, spec, GlobalPhase::explicit_minus_one);
        CHECK(max_distance(extract_unitary(g), extract_unitary(lower_oracles(g))) < 1e-12);
        const Circuit q = build_qae_circuit(m, 2, spec, 2);
        CHECK(max_distance(extract_unitary(q), extract_unitary(lower_oracles(q))) < 1e-12);
    }
}

TEST_CASE("grover operator equals -U S0 U^dagger S_chi") {
    const NetworkModel m = testsupport::two_node_model();
    const GroverSpec spec{2, parse_selection("10", 2)};
    const Matrix u = extract_unitary(build_model_circuit(m, 2));
    const Matrix s0 = diagonal(16, [](std::size_t i) { return i == 0 ? 1.0 : -1.0; });
    // Marked: node 1 good and node 2 failed at step 2, i.e. qubit 2 = 0, qubit 3 = 1.
    const Matrix schi =
        diagonal(16, [](std::size_t i) { return (i & 0b1100) == 0b1000 ? -1.0 : 1.0; });
    // The overall sign is folded into s0.
    const Matrix want = multiply(multiply(multiply(u, s0), adjoint(u)), schi);
    const Matrix got = extract_unitary(build_grover(m, 2, spec, GlobalPhase::explicit_minus_one));
    CHECK(max_distance(got, want) < 1e-12);
}

TEST_CASE("inverse Fourier transform matches the matrix definition") {
    for (int b = 1; b <= 4; ++b) {
        Circuit c;
        c.n_qubits = b;
        std::vector<int> qubits;
        for (int i = 0; i < b; ++i) qubits.push_back(i);
        append_inverse_qft(c, qubits);
        const Matrix u = extract_unitary(c);
        const std::size_t n = std::size_t{1} << b;
        double worst = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t col = 0; col < n; ++col) {
                const Amplitude want =
                    std::polar(1.0 / std::sqrt(double(n)), -2.0 * std::numbers::pi * double(r * col) / double(n));
                worst = std::max(worst, std::abs(u(r, col) - want));
            }
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("circuit marginals equal exact evaluation") {
    auto compare = [](const NetworkModel &m, int max_steps) {
        const auto tables = evaluate(m, max_steps);
        for (int steps = 1; steps <= max_steps; ++steps) {
            const Circuit c = build_model_circuit(m, steps);
            const Statevector s = run(c);
            for (int t = 1; t <= steps; ++t) {
                std::vector<int> qubits;
                for (int n = 0; n < m.size(); ++n) qubits.push_back(c.layout.qubit(n, t));
                const auto dist = marginal_distribution(s, qubits);
                for (std::size_t conf = 0; conf < dist.size(); ++conf) {
                    CHECK(std::abs(dist[conf] - tables[t][conf]) < 1e-9);
                }
            }
        }
    };
    compare(testsupport::two_node_model(), 3);
    compare(testsupport::one_node_model(), 4);
    std::mt19937_64 gen(8);
    for (int i = 0; i < 5; ++i) compare(testsupport::random_model(3, gen), 2);
}

TEST_CASE("grover powers follow the oscillation") {
    const NetworkModel m = testsupport::two_node_model();
    const GroverSpec spec{3, parse_selection("01", 2)};
    const Circuit u = build_model_circuit(m, 3);
    const Circuit g = build_grover(m, 3, spec);
    const auto marked = marked_controls(u.layout, spec);
    std::vector<int> qubits, bits;
    for (const Control &c : marked) {
        qubits.push_back(c.qubit);
        bits.push_back(c.polarity);
    }
    const double p = evaluate(m, 3).back()[0b01];
    const double theta = 2.0 * std::asin(std::sqrt(p));
    Statevector s = run(u);
    for (int ell = 0; ell <= 6; ++ell) {
        CHECK(std::abs(marginal_probability(s, qubits, bits) - oscillation(theta, ell)) < 1e-9);
        s = run(g, s);
    }
}

TEST_CASE("sampling is reproducible and unbiased") {
    Circuit c;
    c.n_qubits = 2;
    c.append(make_ry(2.0 * std::asin(std::sqrt(0.3)), 0));
    const Statevector s = run(c);
    const std::vector<int> q{0};
    const auto a = sample_counts(s, q, 100000, 5);
    CHECK(a == sample_counts(s, q, 100000, 5));
    CHECK(std::abs(a.at(1) / 1e5 - 0.3) < 0.01);
}

TEST_CASE("noisy low-depth channel") {
    const NetworkModel m = testsupport::one_node_model();
    const GroverSpec spec{3, parse_selection("1", 1)};
    const Circuit u = build_model_circuit(m, 3);
    const Circuit g = build_grover(m, 3, spec);
    const auto marked = marked_controls(u.layout, spec);

    const NoisyCounts clean = run_noisy_lowdepth(u, g, 3, 4000, {0.0, 1}, marked);
    CHECK(clean.scrambled == 0);
    const NoisyCounts dead = run_noisy_lowdepth(u, g, 2, 4000, {1.0, 1}, marked);
    CHECK(dead.scrambled == 4000);
    CHECK(std::abs(dead.marked / 4000.0 - 0.5) < 0.04);
    // No Grover application means no error opportunity.
    CHECK(run_noisy_lowdepth(u, g, 0, 100, {1.0, 1}, marked).scrambled == 0);

    const NoiseSpec spec_a = NoiseSpec::from_decay_rate(0.977, 3);
    CHECK(std::abs(spec_a.per_grover_error - (1.0 - std::exp(-0.977))) < 1e-15);
}

TEST_CASE("register limits") {
    Circuit c;
    c.n_qubits = 5;
    SimOptions small{4};
    try {
        run(c, small);
        FAIL("expected resource limit");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::resource_limit);
    }
    CHECK_THROWS_AS(run(c, Statevector(3)), Error);
}
