#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/circuit.hpp"
#include "qnet/sim.hpp"

namespace qnet {

struct TraceRow {
    int ell = 0;
    std::uint64_t shots = 0;
    std::uint64_t marked = 0;

    double fraction() const { return static_cast<double>(marked) / static_cast<double>(shots); }

    bool operator==(const TraceRow &) const = default;
};

/// Marked counts per Grover power of a low-depth run.
struct LowDepthTrace {
    std::vector<TraceRow> rows;

    /// Throws unless rows are nonempty, powers distinct and nonnegative,
    /// shots >= 1 and marked <= shots.
    void check() const;

    bool operator==(const LowDepthTrace &) const = default;
};

/// Delimited text with header `l,shots,marked` and one row per power.
LowDepthTrace parse_trace(std::string_view text);
LowDepthTrace load_trace_file(const std::filesystem::path &path);
std::string format_trace(const LowDepthTrace &trace);

/// sin^2((2 ell + 1) theta / 2), the noiseless marked probability.
double oscillation(double theta, double ell);

/// e^{-a ell} sin^2((2 ell + 1) theta / 2) + (1 - e^{-a ell}) f.
/// `ell` may be real-valued for plotting.
double predict(double theta, double ell, double a, double f);

struct FitConfig {
    std::vector<double> theta_starts;  // empty: pi * i / 40 for i = 1..39
    std::vector<double> a_starts{-0.1, 0.0, 0.25, 0.5, 1.0, 2.0};
    std::vector<double> f_starts{0.25, 0.5, 0.75};
    int max_iterations = 5000;
    double gradient_tolerance = 1e-9;
    /// Keep the loss after every accepted step of the winning start.
    bool record_history = false;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;
};

struct FitResult {
    /// Grover eigenphase, p = sin^2(theta / 2), folded into [0, pi].
    double theta = 0.0;
    double a = 0.0;
    double f = 0.0;
    double probability = 0.0;
    double loss = 0.0;
    int iterations = 0;
    std::vector<double> loss_history;

    /// The angle in the p = sin^2(angle) convention.
    double half_theta() const { return theta / 2.0; }
};

/// Folds theta onto [0, pi] using the 2 pi - theta symmetry.
double resolve_angle(double theta);

/// Least-squares fit of sin^2((2 ell + 1) theta / 2) to the marked fractions.
FitResult fit_sine(const LowDepthTrace &trace, const FitConfig &config = {});

/// Least-squares fit of (theta, a, f) in the damped model; f in [0, 1], a
/// unconstrained. `fixed_f` pins f instead of fitting it.
FitResult fit_noise_model(const LowDepthTrace &trace, const FitConfig &config = {},
                          std::optional<double> fixed_f = std::nullopt);

/// Smallest N with sqrt(2/pi) sqrt(f(1-f)/N) < e^{-a ell}.
std::uint64_t min_shots(double a, int ell, double f);

/// Largest ell with sqrt(2/pi) sqrt(f(1-f)/N) < e^{-a ell}; requires a > 0.
int max_depth(double a, std::uint64_t shots, double f);

/// Executes U G^ell for every ell of the schedule and counts marked shots.
/// per_grover_error = 0 gives noiseless sampling.
LowDepthTrace run_schedule(const NetworkModel &model, int steps, const GroverSpec &spec,
                           const std::vector<int> &schedule, std::uint64_t shots,
                           double per_grover_error, std::uint64_t seed,
                           const SimOptions &options = {});

}  // namespace qnet
