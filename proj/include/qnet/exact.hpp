#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "qnet/model.hpp"

namespace qnet {

/// Probability of every configuration at one time step, indexed by the
/// configuration bits.
struct DistributionTable {
    int nodes = 0;
    std::vector<double> probs;

    double operator[](std::uint32_t config) const { return probs[config]; }
    double total() const;

    /// Everything on the all-good configuration.
    static DistributionTable all_good(int nodes);
};

/// Pairs (b, c) of frozen previous-step configuration b and the current-step
/// configuration c being built node by node, with their probability mass.
/// Inserting an existing pair adds the masses; zero masses are dropped.
class PairTable {
  public:
    using Key = std::pair<std::uint32_t, std::uint32_t>;

    void add(std::uint32_t previous, std::uint32_t current, double mass);
    double total() const;
    double at(std::uint32_t previous, std::uint32_t current) const;

    const std::map<Key, double> &entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Each configuration c of the table becomes the pair (c, c).
    static PairTable seeded_from(const DistributionTable &table);

    /// Sums out the previous-step half of every pair.
    DistributionTable current_marginal(int nodes) const;

  private:
    std::map<Key, double> entries_;
};

/// Applies the transition rule of one node to every pair. Reads only the
/// frozen half b, so nodes may be processed in any order.
PairTable evolve_node(const PairTable &table, const NetworkModel &model, int node);

/// One full time step: re-seed with (c, c), fold every node, marginalize.
DistributionTable advance(const DistributionTable &table, const NetworkModel &model);

/// Tables for t = 0..steps; t = 0 is the all-good configuration.
std::vector<DistributionTable> evaluate(const NetworkModel &model, int steps);

/// Probability that every listed node is in its listed state.
double marginal(const DistributionTable &table, std::span<const NodeState> selection);

}  // namespace qnet
