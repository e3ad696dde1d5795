#include "qnet/mc.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace qnet {

std::vector<double> McResult::estimates() const {
    std::vector<double> out(counts.size(), 0.0);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        out[c] = static_cast<double>(counts[c]) / static_cast<double>(runs);
    }
    return out;
}

Configuration sample_trajectory(const NetworkModel &model, int steps, StreamRng &rng) {
    const int k = model.size();
    std::uint32_t state = 0;
    for (int t = 1; t <= steps; ++t) {
        std::uint32_t next = 0;
        for (int n = 0; n < k; ++n) {
            const std::uint32_t bit = 1u << n;
            if (state & bit) {
                if (!rng.bernoulli(model.p_recover[n])) {
                    next |= bit;
                }
                continue;
            }
            bool failed = rng.bernoulli(model.p_fail[n]);
            // Ancestors in ascending order; a failure is final for this step.
            for (int m = 0; m < k && !failed; ++m) {
                const double p = model.p_trigger[m][n];
                if (p > 0.0 && (state & (1u << m))) {
                    failed = rng.bernoulli(p);
                }
            }
            if (failed) {
                next |= bit;
            }
        }
        state = next;
    }
    return Configuration{state, k};
}

McResult evaluate_mc(const NetworkModel &model, int steps, std::uint64_t runs,
                     std::uint64_t seed, const McOptions &options) {
    validate(model);
    if (runs == 0) {
        throw Error(ErrorKind::invalid_argument, "Monte Carlo needs at least one run");
    }
    if (steps < 0) {
        throw Error(ErrorKind::out_of_range, "number of steps must be >= 0");
    }
    if (model.size() > 24) {
        throw Error(ErrorKind::resource_limit, "Monte Carlo histogram limited to 24 nodes");
    }
    const std::uint64_t chunk = std::max<std::uint64_t>(options.chunk_size, 1);
    const std::uint64_t n_chunks = (runs + chunk - 1) / chunk;
    const std::size_t n_configs = std::size_t{1} << model.size();

    unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
    workers = static_cast<unsigned>(
        std::clamp<std::uint64_t>(workers ? workers : 1, 1, n_chunks));

    std::vector<std::vector<std::uint64_t>> partial(
        workers, std::vector<std::uint64_t>(n_configs, 0));
    std::atomic<std::uint64_t> next_chunk{0};

    auto work = [&](unsigned w) {
        auto &hist = partial[w];
        for (std::uint64_t i = next_chunk++; i < n_chunks; i = next_chunk++) {
            StreamRng rng(seed, i);
            const std::uint64_t begin = i * chunk;
            const std::uint64_t end = std::min(runs, begin + chunk);
            for (std::uint64_t r = begin; r < end; ++r) {
                ++hist[sample_trajectory(model, steps, rng).bits];
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    McResult result;
    result.nodes = model.size();
    result.runs = runs;
    result.counts.assign(n_configs, 0);
    for (const auto &hist : partial) {
        for (std::size_t c = 0; c < n_configs; ++c) {
            result.counts[c] += hist[c];
        }
    }
    return result;
}

}  // namespace qnet
