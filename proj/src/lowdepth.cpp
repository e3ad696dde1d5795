#include "qnet/lowdepth.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace qnet {

namespace {

using Params = std::array<double, 3>;  // theta, a, f
constexpr std::size_t kTheta = 0, kDecay = 1, kFloor = 2;

struct Problem {
    std::vector<double> ell;
    std::vector<double> target;
    std::array<bool, 3> free{true, true, true};
};

Problem make_problem(const LowDepthTrace &trace) {
    trace.check();
    Problem p;
    for (const TraceRow &row : trace.rows) {
        p.ell.push_back(row.ell);
        p.target.push_back(row.fraction());
    }
    return p;
}

double loss_and_gradient(const Problem &prob, const Params &x, Params &grad) {
    grad = {0.0, 0.0, 0.0};
    double loss = 0.0;
    for (std::size_t i = 0; i < prob.ell.size(); ++i) {
        const double ell = prob.ell[i];
        const double k = 2.0 * ell + 1.0;
        const double decay = std::exp(-x[kDecay] * ell);
        const double s = std::sin(k * x[kTheta] / 2.0);
        const double osc = s * s;
        const double r = decay * osc + (1.0 - decay) * x[kFloor];
        const double res = r - prob.target[i];
        loss += res * res;
        grad[kTheta] += 2.0 * res * decay * (k / 2.0) * std::sin(k * x[kTheta]);
        grad[kDecay] += 2.0 * res * (-ell * decay * (osc - x[kFloor]));
        grad[kFloor] += 2.0 * res * (1.0 - decay);
    }
    for (std::size_t j = 0; j < 3; ++j) {
        if (!prob.free[j]) {
            grad[j] = 0.0;
        }
    }
    return loss;
}

Params project(const Problem &prob, Params x) {
    if (prob.free[kFloor]) {
        x[kFloor] = std::clamp(x[kFloor], 0.0, 1.0);
    }
    return x;
}

// Gradient with the components that would push f out of [0, 1] removed.
double projected_gradient_norm(const Problem &prob, const Params &x, const Params &g) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        double gj = prob.free[j] ? g[j] : 0.0;
        if (j == kFloor && ((x[j] <= 0.0 && gj > 0.0) || (x[j] >= 1.0 && gj < 0.0))) {
            gj = 0.0;
        }
        sum += gj * gj;
    }
    return std::sqrt(sum);
}

FitResult descend(const Problem &prob, Params x, const FitConfig &config, bool keep_history) {
    constexpr double kArmijo = 0.25;
    constexpr double kMinStep = 1e-20;
    constexpr double kMaxStep = 1e3;

    x = project(prob, x);
    Params g;
    double loss = loss_and_gradient(prob, x, g);

    FitResult out;
    if (keep_history) {
        out.loss_history.push_back(loss);
    }
    double step = 1.0;
    int it = 0;
    for (; it < config.max_iterations && std::isfinite(loss); ++it) {
        if (projected_gradient_norm(prob, x, g) < config.gradient_tolerance) {
            break;
        }
        step = std::min(step * 2.0, kMaxStep);
        bool accepted = false;
        while (step >= kMinStep) {
            Params trial;
            for (std::size_t j = 0; j < 3; ++j) {
                trial[j] = prob.free[j] ? x[j] - step * g[j] : x[j];
            }
            trial = project(prob, trial);
            double decrease = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                decrease += g[j] * (x[j] - trial[j]);
            }
            Params trial_grad;
            const double trial_loss = loss_and_gradient(prob, trial, trial_grad);
            if (std::isfinite(trial_loss) && trial_loss < loss &&
                trial_loss <= loss - kArmijo * decrease) {
                x = trial;
                g = trial_grad;
                loss = trial_loss;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if (!accepted) {
            break;  // the loss cannot decrease at machine precision
        }
        if (keep_history) {
            out.loss_history.push_back(loss);
        }
    }

    out.theta = resolve_angle(x[kTheta]);
    out.a = x[kDecay];
    out.f = x[kFloor];
    out.loss = loss;
    out.iterations = it;
    const double s = std::sin(out.theta / 2.0);
    out.probability = s * s;
    return out;
}

bool better(const FitResult &candidate, const FitResult &best) {
    if (!std::isfinite(candidate.loss)) {
        return false;
    }
    if (!std::isfinite(best.loss)) {
        return true;
    }
    const double tie = 1e-12 * best.loss + 1e-20;
    if (candidate.loss < best.loss - tie) {
        return true;
    }
    return candidate.loss <= best.loss + tie && candidate.theta < best.theta;
}

FitResult multistart(const Problem &prob, const std::vector<Params> &starts,
                     const FitConfig &config) {
    std::vector<FitResult> results(starts.size());
    unsigned workers = config.workers ? config.workers : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(starts.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < starts.size(); i = next++) {
            results[i] = descend(prob, starts[i], config, false);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto &t : pool) {
            t.join();
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (better(results[i], results[best])) {
            best = i;
        }
    }
    if (!std::isfinite(results[best].loss)) {
        throw Error(ErrorKind::fit_diverged, "no start produced a finite loss");
    }
    if (!config.record_history) {
        return results[best];
    }
    // Re-run the winner deterministically to collect its loss trajectory.
    return descend(prob, starts[best], config, true);
}

std::vector<double> theta_grid(const FitConfig &config) {
    if (!config.theta_starts.empty()) {
        return config.theta_starts;
    }
    std::vector<double> grid;
    for (int i = 1; i <= 39; ++i) {
        grid.push_back(std::numbers::pi * i / 40.0);
    }
    return grid;
}

void check_floor_fraction(double f) {
    if (!(f > 0.0 && f < 1.0)) {
        throw Error(ErrorKind::f_degenerate, "signal bound needs f strictly inside (0,1)");
    }
}

bool signal_visible(double a, double ell, std::uint64_t shots, double f) {
    const double mad = std::sqrt(2.0 / std::numbers::pi) *
                       std::sqrt(f * (1.0 - f) / static_cast<double>(shots));
    return mad < std::exp(-a * ell);
}

std::uint64_t parse_uint(std::string_view text, std::size_t line_no, const char *what) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::parse_error, "trace line " + std::to_string(line_no) + ": bad " +
                                                what + " '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

void LowDepthTrace::check() const {
    if (rows.empty()) {
        throw Error(ErrorKind::invalid_argument, "trace has no rows");
    }
    std::set<int> seen;
    for (const TraceRow &row : rows) {
        if (row.ell < 0) {
            throw Error(ErrorKind::out_of_range, "Grover power must be >= 0");
        }
        if (!seen.insert(row.ell).second) {
            throw Error(ErrorKind::invalid_argument,
                        "Grover power " + std::to_string(row.ell) + " listed twice");
        }
        if (row.shots == 0) {
            throw Error(ErrorKind::invalid_argument, "shots must be >= 1");
        }
        if (row.marked > row.shots) {
            throw Error(ErrorKind::out_of_range, "marked count exceeds shots at l=" +
                                                     std::to_string(row.ell));
        }
    }
}

LowDepthTrace parse_trace(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    LowDepthTrace trace;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header) {
            std::string compact;
            for (char ch : line) {
                if (ch != ' ') compact.push_back(ch);
            }
            if (compact != "l,shots,marked") {
                throw Error(ErrorKind::parse_error, "trace header must be 'l,shots,marked'");
            }
            header = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
            fields.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        fields.push_back(rest);
        if (fields.size() != 3) {
            throw Error(ErrorKind::parse_error,
                        "trace line " + std::to_string(line_no) + ": expected 3 fields");
        }
        const std::uint64_t ell = parse_uint(fields[0], line_no, "power");
        if (ell > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
            throw Error(ErrorKind::out_of_range, "Grover power too large");
        }
        trace.rows.push_back({static_cast<int>(ell), parse_uint(fields[1], line_no, "shots"),
                              parse_uint(fields[2], line_no, "marked")});
    }
    if (!header) {
        throw Error(ErrorKind::parse_error, "trace header 'l,shots,marked' missing");
    }
    trace.check();
    return trace;
}

LowDepthTrace load_trace_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::parse_error, "cannot open trace file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_trace(buffer.str());
}

std::string format_trace(const LowDepthTrace &trace) {
    std::ostringstream out;
    out << "l,shots,marked\n";
    for (const TraceRow &row : trace.rows) {
        out << row.ell << ',' << row.shots << ',' << row.marked << '\n';
    }
    return out.str();
}

double oscillation(double theta, double ell) {
    const double s = std::sin((2.0 * ell + 1.0) * theta / 2.0);
    return s * s;
}

double predict(double theta, double ell, double a, double f) {
    const double decay = std::exp(-a * ell);
    return decay * oscillation(theta, ell) + (1.0 - decay) * f;
}

double resolve_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) {
        t += two_pi;
    }
    return t > std::numbers::pi ? two_pi - t : t;
}

FitResult fit_sine(const LowDepthTrace &trace, const FitConfig &config) {
    Problem prob = make_problem(trace);
    prob.free = {true, false, false};
    std::vector<Params> starts;
    for (double theta : theta_grid(config)) {
        starts.push_back({theta, 0.0, 0.0});
    }
    return multistart(prob, starts, config);
}

FitResult fit_noise_model(const LowDepthTrace &trace, const FitConfig &config,
                          std::optional<double> fixed_f) {
    Problem prob = make_problem(trace);
    std::vector<double> f_starts = config.f_starts;
    if (fixed_f) {
        if (!(*fixed_f >= 0.0 && *fixed_f <= 1.0)) {
            throw Error(ErrorKind::out_of_range, "fixed f must lie in [0,1]");
        }
        prob.free[kFloor] = false;
        f_starts = {*fixed_f};
    }
    std::vector<Params> starts;
    for (double theta : theta_grid(config)) {
        for (double a : config.a_starts) {
            for (double f : f_starts) {
                starts.push_back({theta, a, f});
            }
        }
    }
    if (starts.empty()) {
        throw Error(ErrorKind::invalid_argument, "fit has no starting points");
    }
    return multistart(prob, starts, config);
}

std::uint64_t min_shots(double a, int ell, double f) {
    check_floor_fraction(f);
    if (ell < 0) {
        throw Error(ErrorKind::out_of_range, "Grover power must be >= 0");
    }
    const double bound = 2.0 / std::numbers::pi * f * (1.0 - f) * std::exp(2.0 * a * ell);
    if (!std::isfinite(bound) || bound > 0x1.0p62) {
        throw Error(ErrorKind::out_of_range, "required shots exceed 2^62");
    }
    auto n = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(bound)));
    while (!signal_visible(a, ell, n, f)) {
        ++n;
    }
    while (n > 1 && signal_visible(a, ell, n - 1, f)) {
        --n;
    }
    return n;
}

int max_depth(double a, std::uint64_t shots, double f) {
    check_floor_fraction(f);
    if (!(a > 0.0)) {
        throw Error(ErrorKind::a_nonpositive, "depth is unbounded unless a > 0");
    }
    if (shots == 0) {
        throw Error(ErrorKind::invalid_argument, "shots must be >= 1");
    }
    const double limit =
        std::log(std::numbers::pi * static_cast<double>(shots) / (2.0 * f * (1.0 - f))) /
        (2.0 * a);
    int ell = std::max(0, static_cast<int>(std::ceil(limit)) - 1);
    while (signal_visible(a, ell + 1, shots, f)) {
        ++ell;
    }
    while (ell > 0 && !signal_visible(a, ell, shots, f)) {
        --ell;
    }
    return ell;
}

LowDepthTrace run_schedule(const NetworkModel &model, int steps, const GroverSpec &spec,
                           const std::vector<int> &schedule, std::uint64_t shots,
                           double per_grover_error, std::uint64_t seed,
                           const SimOptions &options) {
    if (schedule.empty()) {
        throw Error(ErrorKind::invalid_argument, "schedule is empty");
    }
    if (shots == 0) {
        throw Error(ErrorKind::invalid_argument, "shots must be >= 1");
    }
    const Circuit u = build_model_circuit(model, steps);
    const Circuit g = build_grover(model, steps, spec, GlobalPhase::omit);
    const std::vector<Control> marked = marked_controls(u.layout, spec);
    const NoiseSpec noise{per_grover_error, seed};

    LowDepthTrace trace;
    for (int ell : schedule) {
        const NoisyCounts counts = run_noisy_lowdepth(u, g, ell, shots, noise, marked, options);
        trace.rows.push_back({ell, counts.shots, counts.marked});
    }
    trace.check();
    return trace;
}

}  // namespace qnet
