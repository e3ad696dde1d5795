#include "qnet/exact.hpp"

#include <numeric>
#include <string>

namespace qnet {

double DistributionTable::total() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0);
}

DistributionTable DistributionTable::all_good(int nodes) {
    DistributionTable t;
    t.nodes = nodes;
    t.probs.assign(std::size_t{1} << nodes, 0.0);
    t.probs[0] = 1.0;
    return t;
}

void PairTable::add(std::uint32_t previous, std::uint32_t current, double mass) {
    if (mass == 0.0) {
        return;
    }
    entries_[{previous, current}] += mass;
}

double PairTable::total() const {
    double sum = 0.0;
    for (const auto &[_, mass] : entries_) {
        sum += mass;
    }
    return sum;
}

double PairTable::at(std::uint32_t previous, std::uint32_t current) const {
    auto it = entries_.find({previous, current});
    return it == entries_.end() ? 0.0 : it->second;
}

PairTable PairTable::seeded_from(const DistributionTable &table) {
    PairTable out;
    for (std::uint32_t c = 0; c < table.probs.size(); ++c) {
        out.add(c, c, table.probs[c]);
    }
    return out;
}

DistributionTable PairTable::current_marginal(int nodes) const {
    DistributionTable out;
    out.nodes = nodes;
    out.probs.assign(std::size_t{1} << nodes, 0.0);
    for (const auto &[key, mass] : entries_) {
        out.probs[key.second] += mass;
    }
    return out;
}

PairTable evolve_node(const PairTable &table, const NetworkModel &model, int node) {
    check_node(model, node);
    const std::uint32_t bit = 1u << node;
    const std::vector<int> sources = model.trigger_sources(node);

    PairTable out;
    for (const auto &[key, mass] : table.entries()) {
        const auto [previous, current] = key;
        if (previous & bit) {
            const double recover = model.p_recover[node];
            out.add(previous, current, mass * (1.0 - recover));
            out.add(previous, current & ~bit, mass * recover);
        } else {
            double stay_good = 1.0 - model.p_fail[node];
            for (int m : sources) {
                if (previous & (1u << m)) {
                    stay_good *= 1.0 - model.p_trigger[m][node];
                }
            }
            out.add(previous, current, mass * stay_good);
            out.add(previous, current | bit, mass * (1.0 - stay_good));
        }
    }
    return out;
}

DistributionTable advance(const DistributionTable &table, const NetworkModel &model) {
    PairTable pairs = PairTable::seeded_from(table);
    for (int n = 0; n < model.size(); ++n) {
        pairs = evolve_node(pairs, model, n);
    }
    return pairs.current_marginal(model.size());
}

std::vector<DistributionTable> evaluate(const NetworkModel &model, int steps) {
    validate(model);
    if (steps < 0) {
        throw Error(ErrorKind::out_of_range, "number of steps must be >= 0");
    }
    std::vector<DistributionTable> tables;
    tables.reserve(static_cast<std::size_t>(steps) + 1);
    tables.push_back(DistributionTable::all_good(model.size()));
    for (int t = 1; t <= steps; ++t) {
        tables.push_back(advance(tables.back(), model));
    }
    return tables;
}

double marginal(const DistributionTable &table, std::span<const NodeState> selection) {
    if (selection.empty()) {
        throw Error(ErrorKind::invalid_argument, "marginal needs at least one node");
    }
    std::uint32_t mask = 0;
    std::uint32_t want = 0;
    for (const NodeState &s : selection) {
        if (s.node < 0 || s.node >= table.nodes) {
            throw Error(ErrorKind::invalid_node_index,
                        "node index " + std::to_string(s.node + 1) + " not in 1.." +
                            std::to_string(table.nodes));
        }
        mask |= 1u << s.node;
        if (s.failed) {
            want |= 1u << s.node;
        }
    }
    double sum = 0.0;
    for (std::uint32_t c = 0; c < table.probs.size(); ++c) {
        if ((c & mask) == want) {
            sum += table.probs[c];
        }
    }
    return sum;
}

}  // namespace qnet
