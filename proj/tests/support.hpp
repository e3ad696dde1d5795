#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qnet/model.hpp"

namespace testsupport {

inline std::string data_path(const std::string &name) { return std::string(QNET_DATA_DIR) + "/" + name; }

/// Header-keyed rows of a small comma-separated fixture.
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string &name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw std::runtime_error("no column " + name);
    }
    double number(std::size_t row, const std::string &name) const {
        return std::stod(rows[row][column(name)]);
    }
};

inline std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

inline Csv read_csv(const std::string &name) {
    std::ifstream in(data_path(name));
    if (!in) throw std::runtime_error("missing fixture " + name);
    Csv csv;
    std::string line;
    std::getline(in, line);
    csv.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty()) csv.rows.push_back(split(line));
    }
    return csv;
}

inline qnet::NetworkModel two_node_model() { return qnet::load_model_file(data_path("two_node_model.json")); }
inline qnet::NetworkModel one_node_model() { return qnet::load_model_file(data_path("one_node_model.json")); }

/// Random model with k nodes; roughly a third of the off-diagonal triggers are zero.
inline qnet::NetworkModel random_model(int k, std::mt19937_64 &gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    qnet::NetworkModel m = qnet::NetworkModel::with_nodes(k);
    for (int n = 0; n < k; ++n) {
        m.p_fail[n] = u(gen);
        m.p_recover[n] = u(gen);
        for (int j = 0; j < k; ++j) {
            if (j != n && u(gen) > 0.33) m.p_trigger[j][n] = u(gen);
        }
    }
    return m;
}

/// Probability of moving from configuration `from` to `to` in one step,
/// written as a product of independent per-node transitions.
inline double transition(const qnet::NetworkModel &m, std::uint32_t from, std::uint32_t to) {
    double prob = 1.0;
    for (int n = 0; n < m.size(); ++n) {
        const bool was = (from >> n) & 1u;
        const bool now = (to >> n) & 1u;
        double fail;
        if (was) {
            fail = 1.0 - m.p_recover[n];
        } else {
            double survive = 1.0 - m.p_fail[n];
            for (int j = 0; j < m.size(); ++j) {
                if ((from >> j) & 1u) survive *= 1.0 - m.p_trigger[j][n];
            }
            fail = 1.0 - survive;
        }
        prob *= now ? fail : 1.0 - fail;
    }
    return prob;
}

/// Sums the weight of every trajectory c_1..c_T from all-good, grouped by c_T.
inline std::vector<double> enumerate_trajectories(const qnet::NetworkModel &m, int steps) {
    const std::uint32_t dim = 1u << m.size();
    std::vector<double> out(dim, 0.0);
    const std::uint64_t total = static_cast<std::uint64_t>(std::pow(dim, steps));
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t rest = code;
        double w = 1.0;
        std::uint32_t prev = 0;
        for (int t = 0; t < steps; ++t) {
            const auto c = static_cast<std::uint32_t>(rest % dim);
            rest /= dim;
            w *= transition(m, prev, c);
            prev = c;
        }
        out[prev] += w;
    }
    return out;
}

/// |sin(N pi d) / (N sin(pi d))|^2, the phase estimation kernel.
inline double fejer(double d, double grid) {
    const double s = std::sin(M_PI * d);
    if (std::abs(s) < 1e-15) return 1.0;
    const double v = std::sin(grid * M_PI * d) / (grid * s);
    return v * v;
}

/// Readout distribution of ideal phase estimation on a state spread evenly
/// over the eigenphases +theta and -theta.
inline std::vector<double> qpe_distribution(double theta, int bits) {
    const double grid = std::ldexp(1.0, bits);
    std::vector<double> out(static_cast<std::size_t>(grid));
    for (std::size_t y = 0; y < out.size(); ++y) {
        const double frac = static_cast<double>(y) / grid;
        out[y] = 0.5 * fejer(theta / (2 * M_PI) - frac, grid) + 0.5 * fejer(-theta / (2 * M_PI) - frac, grid);
    }
    return out;
}

}  // namespace testsupport
