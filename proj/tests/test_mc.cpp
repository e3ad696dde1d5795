#include <doctest.h>

#include <cmath>
#include <random>

#include "qnet/exact.hpp"
#include "qnet/mc.hpp"
#include "support.hpp"

using namespace qnet;

TEST_CASE("estimates agree with exact evaluation") {
    std::mt19937_64 gen(3);
    for (int i = 0; i < 5; ++i) {
        const NetworkModel m = testsupport::random_model(1 + i % 3, gen);
        const std::uint64_t runs = 200000;
        const auto est = evaluate_mc(m, 3, runs, 17 + i).estimates();
        const auto exact = evaluate(m, 3).back();
        for (std::size_t c = 0; c < est.size(); ++c) {
            const double sigma = std::sqrt(exact[c] * (1.0 - exact[c]) / runs);
            CHECK(std::abs(est[c] - exact[c]) <= 5.0 * sigma + 1e-12);
        }
    }
}

TEST_CASE("results do not depend on the worker count") {
    const NetworkModel m = testsupport::two_node_model();
    McOptions one{1000, 1}, many{1000, 7};
    const McResult a = evaluate_mc(m, 3, 12345, 42, one);
    const McResult b = evaluate_mc(m, 3, 12345, 42, many);
    CHECK(a.counts == b.counts);
    CHECK(a.runs == 12345);
    std::uint64_t sum = 0;
    for (auto c : a.counts) sum += c;
    CHECK(sum == 12345);
}

TEST_CASE("seeds select different streams") {
    const NetworkModel m = testsupport::two_node_model();
    CHECK(evaluate_mc(m, 3, 5000, 1).counts != evaluate_mc(m, 3, 5000, 2).counts);
    CHECK(evaluate_mc(m, 3, 5000, 1).counts == evaluate_mc(m, 3, 5000, 1).counts);
}

TEST_CASE("deterministic models give a single configuration") {
    NetworkModel m = NetworkModel::with_nodes(2);
    m.p_fail = {1.0, 0.0};
    m.p_recover = {0.0, 0.0};
    const auto est = evaluate_mc(m, 4, 1000, 9).estimates();
    CHECK(est[0b01] == 1.0);
    CHECK(evaluate_mc(m, 0, 10, 9).counts[0] == 10);
}

TEST_CASE("invalid requests are rejected") {
    const NetworkModel m = testsupport::two_node_model();
    CHECK_THROWS_AS(evaluate_mc(m, 3, 0, 1), Error);
    CHECK_THROWS_AS(evaluate_mc(NetworkModel::with_nodes(25), 1, 1, 1), Error);
}

TEST_CASE("stream draws are uniform and reproducible") {
    StreamRng a(5, 3), b(5, 3), c(5, 4);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(a.uniform() != c.uniform());
    std::vector<int> hist(6, 0);
    for (int i = 0; i < 60000; ++i) ++hist[a.below(6)];
    for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}
