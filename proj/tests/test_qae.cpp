#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "qnet/exact.hpp"
#include "qnet/qae.hpp"
#include "support.hpp"

using namespace qnet;

namespace {

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

}  // namespace

TEST_CASE("three-bit decode grid") {
    const auto csv = testsupport::read_csv("decode_b3.csv");
    for (std::size_t row = 0; row < csv.rows.size(); ++row) {
        const auto y = static_cast<std::uint64_t>(csv.number(row, "y"));
        const DecodedOutcome d = decode_outcome(y, 3);
        CHECK(round3(d.theta) == doctest::Approx(csv.number(row, "theta")).epsilon(1e-12));
        CHECK(round3(d.probability) == doctest::Approx(csv.number(row, "p")).epsilon(1e-12));
    }
    CHECK_THROWS_AS(decode_outcome(8, 3), Error);
    CHECK_THROWS_AS(decode_outcome(0, 0), Error);
}

TEST_CASE("decode symmetry is exact") {
    for (int b = 1; b <= 12; ++b) {
        const std::uint64_t n = std::uint64_t{1} << b;
        for (std::uint64_t y = 0; y < n; ++y) {
            const double p = decode_outcome(y, b).probability;
            CHECK(p == decode_outcome((n - y) % n, b).probability);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("readout distribution matches ideal phase estimation") {
    const NetworkModel m = testsupport::two_node_model();
    const auto exact = evaluate(m, 2).back();
    for (const char *sel : {"00", "01", "10", "11"}) {
        const GroverSpec spec{2, parse_selection(sel, 2)};
        const double p = exact[Configuration::parse(sel).bits];
        const double theta = 2.0 * std::asin(std::sqrt(p));
        for (int bits = 1; bits <= 4; ++bits) {
            const QaeResult r = run_standard_qae(m, 2, spec, bits, 100, 1);
            const auto want = testsupport::qpe_distribution(theta, bits);
            REQUIRE(r.outcome_distribution.size() == want.size());
            for (std::size_t y = 0; y < want.size(); ++y) {
                CHECK(std::abs(r.outcome_distribution[y] - want[y]) < 1e-9);
            }
        }
    }
}

TEST_CASE("modal estimates approach the exact probability") {
    const NetworkModel m = testsupport::two_node_model();
    const GroverSpec spec{3, parse_selection("11", 2)};
    const QaeResult b3 = run_standard_qae(m, 3, spec, 3, 1000, 7);
    CHECK(std::abs(b3.probability - 0.5) < 1e-12);
    const QaeResult b5 = run_standard_qae(m, 3, spec, 5, 1000, 7);
    // Neighbouring grid probabilities around the modal outcome.
    const std::uint64_t y = std::min(b5.modal_outcome, 32 - b5.modal_outcome);
    const double lo = decode_outcome(y == 0 ? 0 : y - 1, 5).probability;
    const double hi = decode_outcome(std::min<std::uint64_t>(y + 1, 16), 5).probability;
    CHECK(std::abs(b5.probability - 0.333) <= std::max(b5.probability - lo, hi - b5.probability));
    std::uint64_t total = 0;
    for (const auto &[out, count] : b5.outcome_counts) total += count;
    CHECK(total == 1000);
}

TEST_CASE("impossible configurations estimate zero") {
    NetworkModel m = NetworkModel::with_nodes(2);
    m.p_fail = {0.4, 0.0};
    m.p_recover = {0.5, 0.5};
    const GroverSpec spec{2, parse_selection("1x", 2)};
    const QaeResult r = run_standard_qae(m, 2, spec, 4, 200, 3);
    CHECK(r.modal_outcome == 0);
    CHECK(r.probability == 0.0);
    CHECK_THROWS_AS(grover_eigenphase(m, 2, spec), Error);
}

TEST_CASE("eigenphases reproduce the published values") {
    const NetworkModel m = testsupport::two_node_model();
    const auto csv = testsupport::read_csv("two_node_eigen.csv");
    for (std::size_t row = 0; row < csv.rows.size(); ++row) {
        const std::string c = csv.rows[row][csv.column("config")];
        const EigenphaseResult r = grover_eigenphase(m, 3, {3, parse_selection(c, 2)});
        CHECK(std::abs(r.theta - csv.number(row, "theta")) < 1e-3);
        CHECK(std::abs(r.lambda_plus.real() - csv.number(row, "lambda_re")) < 1e-3);
        CHECK(std::abs(r.lambda_plus.imag() - csv.number(row, "lambda_im")) < 1e-3);
        CHECK(r.lambda_minus == std::conj(r.lambda_plus));
        CHECK(std::abs(std::abs(r.lambda_plus) - 1.0) < 1e-9);
        CHECK(r.residual < 1e-8);
    }
}

TEST_CASE("eigenphase probability equals exact evaluation") {
    const NetworkModel m = testsupport::two_node_model();
    const auto tables = evaluate(m, 3);
    for (int t = 1; t <= 3; ++t) {
        for (std::uint32_t c = 0; c < 4; ++c) {
            const EigenphaseResult r =
                grover_eigenphase(m, 3, {t, full_selection(Configuration{c, 2})});
            CHECK(std::abs(r.probability - tables[t][c]) < 1e-9);
            CHECK(r.residual < 1e-8);
        }
    }
}

TEST_CASE("eigenvalues agree with a dense eigensolver") {
    const NetworkModel m = testsupport::two_node_model();
    for (const char *sel : {"00", "01", "10", "11"}) {
        const GroverSpec spec{3, parse_selection(sel, 2)};
        const Matrix g = extract_unitary(build_grover(m, 3, spec, GlobalPhase::explicit_minus_one));
        Eigen::MatrixXcd dense(g.dim, g.dim);
        for (std::size_t r = 0; r < g.dim; ++r)
            for (std::size_t c = 0; c < g.dim; ++c) dense(r, c) = g(r, c);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dense, false);
        const EigenphaseResult ours = grover_eigenphase(m, 3, spec);
        int plus = 0, minus = 0, trivial = 0;
        for (const auto &ev : solver.eigenvalues()) {
            if (std::abs(ev - ours.lambda_plus) < 1e-8) ++plus;
            else if (std::abs(ev - ours.lambda_minus) < 1e-8) ++minus;
            else if (std::abs(std::abs(ev.real()) - 1.0) < 1e-8) ++trivial;
        }
        CHECK(plus >= 1);
        CHECK(minus >= 1);
        CHECK(plus + minus + trivial == static_cast<int>(g.dim));
    }
}

TEST_CASE("always-failing node is degenerate") {
    NetworkModel m = NetworkModel::with_nodes(1);
    m.p_fail = {1.0};
    try {
        grover_eigenphase(m, 1, {1, parse_selection("1", 1)});
        FAIL("expected degenerate subspace");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::degenerate_subspace);
    }
}
