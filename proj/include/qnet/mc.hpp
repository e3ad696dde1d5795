#pragma once

#include <cstdint>
#include <vector>

#include "qnet/model.hpp"
#include "qnet/rng.hpp"

namespace qnet {

struct McResult {
    int nodes = 0;
    std::uint64_t runs = 0;
    /// Occurrences of each configuration at the final step.
    std::vector<std::uint64_t> counts;

    /// counts / runs.
    std::vector<double> estimates() const;
};

struct McOptions {
    /// Trajectories per seeded chunk. Part of the reproducibility contract:
    /// changing it changes the sampled values.
    std::uint64_t chunk_size = 1 << 16;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;
};

/// Samples one trajectory from all-good at t = 0 and returns the
/// configuration at t = steps.
Configuration sample_trajectory(const NetworkModel &model, int steps, StreamRng &rng);

/// Frequency estimate of the configuration distribution at t = steps.
/// Identical output for any worker count given (seed, runs, chunk_size).
McResult evaluate_mc(const NetworkModel &model, int steps, std::uint64_t runs,
                     std::uint64_t seed, const McOptions &options = {});

}  // namespace qnet
