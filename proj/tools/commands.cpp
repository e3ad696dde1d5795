#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "qnet/circuit.hpp"
#include "qnet/exact.hpp"
#include "qnet/lowdepth.hpp"
#include "qnet/mc.hpp"
#include "qnet/qae.hpp"
#include "qnet/sim.hpp"

namespace qnet::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kReportVersion = 1;
constexpr double kCurveStep = 0.05;

struct Common {
    std::string model;
    int steps = 1;
    std::string config;
    std::uint64_t seed = 1;
    std::uint64_t shots = 1000;
    std::string out;
};

struct Inputs {
    Common common;
    // mc
    std::vector<std::uint64_t> runs{10000};
    int repeats = 1;
    // circuit
    std::string kind = "model";
    bool lower = false;
    std::string emit;
    // qae
    std::vector<int> bits{3};
    int at = 0;
    bool eigenphase = false;
    // lowdepth
    std::string schedule = "0..8";
    std::optional<double> decay;
    std::optional<double> error;
    std::string fix_f;
    std::string trace_out;
    // fit
    std::string trace;
    std::optional<double> exact;
    // plotdata
    std::string report;
    std::string figure;
};

Json model_json(const NetworkModel &model) { return Json::parse(save_model(model)); }

Json fit_json(const FitResult &fit) {
    return Json{{"theta", fit.theta},         {"half_theta", fit.half_theta()},
                {"a", fit.a},                 {"f", fit.f},
                {"probability", fit.probability}, {"loss", fit.loss},
                {"iterations", fit.iterations}};
}

Json trace_json(const LowDepthTrace &trace) {
    Json rows = Json::array();
    for (const TraceRow &row : trace.rows) {
        rows.push_back({{"l", row.ell},
                        {"shots", row.shots},
                        {"marked", row.marked},
                        {"fraction", row.fraction()}});
    }
    return rows;
}

Json probabilities_json(const DistributionTable &table) {
    Json probs = Json::object();
    for (std::uint32_t c = 0; c < table.probs.size(); ++c) {
        probs[config_string(c, table.nodes)] = table.probs[c];
    }
    return probs;
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream file(path);
    if (!file || !(file << text)) {
        throw Error(ErrorKind::invalid_argument, "cannot write " + path);
    }
}

int marked_step(const Inputs &in) {
    const int at = in.at > 0 ? in.at : in.common.steps;
    if (at < 1 || at > in.common.steps) {
        throw Error(ErrorKind::out_of_range,
                    "--at must lie in 1.." + std::to_string(in.common.steps));
    }
    return at;
}

GroverSpec grover_spec(const Inputs &in, const NetworkModel &model) {
    if (in.common.config.empty()) {
        throw Error(ErrorKind::invalid_argument, "--config is required");
    }
    return GroverSpec{marked_step(in), parse_selection(in.common.config, model.size())};
}

double exact_marginal(const NetworkModel &model, const GroverSpec &spec) {
    return marginal(evaluate(model, spec.step).back(), spec.marked);
}

Json cmd_exact(const Inputs &in) {
    const NetworkModel model = load_model_file(in.common.model);
    if (in.common.steps < 0) {
        throw Error(ErrorKind::out_of_range, "--steps must be >= 0");
    }
    const auto tables = evaluate(model, in.common.steps);
    Json results{{"tables", Json::array()}};
    for (std::size_t t = 0; t < tables.size(); ++t) {
        results["tables"].push_back({{"t", t}, {"probabilities", probabilities_json(tables[t])}});
    }
    if (!in.common.config.empty()) {
        const auto selection = parse_selection(in.common.config, model.size());
        Json marginals = Json::array();
        for (std::size_t t = 0; t < tables.size(); ++t) {
            marginals.push_back({{"t", t}, {"probability", marginal(tables[t], selection)}});
        }
        results["marginals"] = marginals;
    }
    return results;
}

Json cmd_mc(const Inputs &in) {
    const NetworkModel model = load_model_file(in.common.model);
    if (in.repeats < 1) {
        throw Error(ErrorKind::invalid_argument, "--repeats must be >= 1");
    }
    const int k = model.size();
    Json results{{"exact", probabilities_json(evaluate(model, in.common.steps).back())},
                 {"series", Json::array()}};
    for (std::uint64_t runs : in.runs) {
        const std::size_t n_configs = std::size_t{1} << k;
        std::vector<std::vector<double>> per_config(n_configs);
        for (int r = 0; r < in.repeats; ++r) {
            const auto est =
                evaluate_mc(model, in.common.steps, runs, in.common.seed + r).estimates();
            for (std::size_t c = 0; c < n_configs; ++c) {
                per_config[c].push_back(est[c]);
            }
        }
        Json estimates = Json::object(), mean = Json::object(), spread = Json::object();
        for (std::size_t c = 0; c < n_configs; ++c) {
            const auto &xs = per_config[c];
            double mu = 0.0;
            for (double x : xs) mu += x;
            mu /= static_cast<double>(xs.size());
            double var = 0.0;
            for (double x : xs) var += (x - mu) * (x - mu);
            var = xs.size() > 1 ? var / static_cast<double>(xs.size() - 1) : 0.0;
            const std::string key = config_string(static_cast<std::uint32_t>(c), k);
            estimates[key] = xs;
            mean[key] = mu;
            spread[key] = std::sqrt(var);
        }
        results["series"].push_back(
            {{"runs", runs}, {"estimates", estimates}, {"mean", mean}, {"std", spread}});
    }
    return results;
}

Json cmd_circuit(const Inputs &in) {
    const NetworkModel model = load_model_file(in.common.model);
    Circuit c;
    if (in.kind == "model") {
        c = build_model_circuit(model, in.common.steps);
    } else if (in.kind == "grover") {
        c = build_grover(model, in.common.steps, grover_spec(in, model));
    } else if (in.kind == "qae") {
        if (in.bits.size() != 1) {
            throw Error(ErrorKind::invalid_argument, "qae circuit takes a single --bits value");
        }
        c = build_qae_circuit(model, in.common.steps, grover_spec(in, model), in.bits.front());
    } else {
        throw Error(ErrorKind::invalid_argument, "--kind must be model, grover or qae");
    }
    if (in.lower) {
        c = lower_oracles(c);
    }
    const std::string listing = emit_gates(c);
    if (!in.emit.empty()) {
        write_text(in.emit, listing);
    }
    std::vector<double> angles;
    for (const Gate &g : c.gates) {
        if (g.kind == GateKind::ry &&
            std::none_of(angles.begin(), angles.end(), [&](double a) { return a == g.angle; })) {
            angles.push_back(g.angle);
        }
    }
    Json gates = Json::array();
    std::istringstream lines(listing);
    for (std::string line; std::getline(lines, line);) {
        gates.push_back(line);
    }
    return Json{{"qubits", c.n_qubits},
                {"gate_count", c.gates.size()},
                {"ancillas", c.ancillas},
                {"rotation_angles", angles},
                {"gates", gates}};
}

Json cmd_qae(const Inputs &in) {
    const NetworkModel model = load_model_file(in.common.model);
    const GroverSpec spec = grover_spec(in, model);
    Json results{{"exact_probability", exact_marginal(model, spec)}, {"sweep", Json::array()}};
    for (int b : in.bits) {
        const QaeResult r =
            run_standard_qae(model, in.common.steps, spec, b, in.common.shots, in.common.seed);
        Json counts = Json::object();
        for (const auto &[y, n] : r.outcome_counts) {
            counts[std::to_string(y)] = n;
        }
        results["sweep"].push_back({{"bits", b},
                                    {"modal_outcome", r.modal_outcome},
                                    {"theta", r.theta},
                                    {"probability", r.probability},
                                    {"counts", counts}});
    }
    if (in.eigenphase) {
        const EigenphaseResult e = grover_eigenphase(model, in.common.steps, spec);
        results["eigenphase"] = {{"theta", e.theta},
                                 {"lambda_plus", {e.lambda_plus.real(), e.lambda_plus.imag()}},
                                 {"lambda_minus", {e.lambda_minus.real(), e.lambda_minus.imag()}},
                                 {"probability", e.probability},
                                 {"residual", e.residual}};
    }
    return results;
}

std::optional<double> parse_fix_f(const std::string &text, const GroverSpec *spec) {
    if (text.empty()) {
        return std::nullopt;
    }
    if (text == "marked") {
        if (!spec) {
            throw Error(ErrorKind::invalid_argument, "--fix-f marked needs a model and config");
        }
        return marked_fraction(*spec);
    }
    try {
        std::size_t used = 0;
        const double f = std::stod(text, &used);
        if (used == text.size()) {
            return f;
        }
    } catch (const std::exception &) {
    }
    throw Error(ErrorKind::invalid_argument, "--fix-f takes a number or 'marked'");
}

Json fits_json(const LowDepthTrace &trace, std::optional<double> fixed_f) {
    return Json{{"sine", fit_json(fit_sine(trace))},
                {"noise", fit_json(fit_noise_model(trace, {}, fixed_f))}};
}

Json cmd_lowdepth(const Inputs &in) {
    const NetworkModel model = load_model_file(in.common.model);
    const GroverSpec spec = grover_spec(in, model);
    if (in.decay && in.error) {
        throw Error(ErrorKind::invalid_argument, "give --decay or --error, not both");
    }
    double eps = 0.0;
    if (in.decay) {
        eps = NoiseSpec::from_decay_rate(*in.decay, in.common.seed).per_grover_error;
    } else if (in.error) {
        eps = *in.error;
    }
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw Error(ErrorKind::out_of_range, "per-Grover error must lie in [0,1]");
    }
    const double decay = -std::log1p(-eps);
    const std::vector<int> schedule = parse_schedule(in.schedule);
    const LowDepthTrace trace = run_schedule(model, in.common.steps, spec, schedule,
                                             in.common.shots, eps, in.common.seed);
    if (!in.trace_out.empty()) {
        write_text(in.trace_out, format_trace(trace));
    }
    const double f = marked_fraction(spec);
    Json results{{"exact_probability", exact_marginal(model, spec)},
                 {"marked_fraction", f},
                 {"noise", {{"per_grover_error", eps}, {"decay_rate", decay}}},
                 {"trace", trace_json(trace)}};
    for (const TraceRow &row : trace.rows) {
        if (row.ell == 0) {
            results["direct_estimate"] = row.fraction();
        }
    }
    if (schedule != std::vector<int>{0}) {
        results["fits"] = fits_json(trace, parse_fix_f(in.fix_f, &spec));
    }
    if (decay > 0.0 && f > 0.0 && f < 1.0 && std::isfinite(decay)) {
        const int deepest = *std::max_element(schedule.begin(), schedule.end());
        results["bounds"] = {{"max_depth", max_depth(decay, in.common.shots, f)},
                             {"min_shots_deepest", min_shots(decay, deepest, f)}};
    }
    return results;
}

Json cmd_fit(const Inputs &in) {
    if (in.trace.empty()) {
        throw Error(ErrorKind::invalid_argument, "--trace is required");
    }
    const LowDepthTrace trace = load_trace_file(in.trace);
    Json results;
    if (in.exact) {
        results["exact_probability"] = *in.exact;
    }
    results["trace"] = trace_json(trace);
    results["fits"] = fits_json(trace, parse_fix_f(in.fix_f, nullptr));
    return results;
}

// ---- plot data ----

using Row = std::tuple<std::string, double, double>;

[[noreturn]] void missing(const std::string &what) {
    throw Error(ErrorKind::missing_series, "report has no " + what);
}

const Json &need(const Json &object, const char *key) {
    if (!object.is_object() || !object.contains(key)) {
        missing(std::string("'") + key + "' series");
    }
    return object.at(key);
}

std::vector<Row> spread_series(const Json &results) {
    std::vector<Row> rows;
    const Json &series = need(results, "series");
    if (series.empty()) {
        missing("Monte Carlo series");
    }
    for (const Json &entry : series) {
        const double runs = entry.at("runs").get<double>();
        for (const auto &[config, values] : entry.at("estimates").items()) {
            for (const Json &v : values) {
                rows.emplace_back(config, runs, v.get<double>());
            }
        }
    }
    for (const auto &[config, p] : need(results, "exact").items()) {
        for (const Json &entry : series) {
            rows.emplace_back("exact-" + config, entry.at("runs").get<double>(), p.get<double>());
        }
    }
    return rows;
}

std::vector<Row> resolution_series(const Json &results) {
    std::vector<Row> rows;
    const Json &sweep = need(results, "sweep");
    if (sweep.empty()) {
        missing("resolution sweep");
    }
    for (const Json &entry : sweep) {
        rows.emplace_back("estimate", entry.at("bits").get<double>(),
                          entry.at("probability").get<double>());
    }
    const double exact = need(results, "exact_probability").get<double>();
    for (const Json &entry : sweep) {
        rows.emplace_back("exact", entry.at("bits").get<double>(), exact);
    }
    return rows;
}

std::vector<Row> curve_series(const Json &results) {
    std::vector<Row> rows;
    const Json &trace = need(results, "trace");
    if (trace.empty()) {
        missing("measured fractions");
    }
    double lo = 1e300, hi = -1e300;
    for (const Json &row : trace) {
        const double ell = row.at("l").get<double>();
        lo = std::min(lo, ell);
        hi = std::max(hi, ell);
        rows.emplace_back("measured", ell, row.at("fraction").get<double>());
    }
    const int samples = static_cast<int>(std::llround((hi - lo) / kCurveStep));
    auto sample = [&](const std::string &name, const std::function<double(double)> &fn) {
        for (int i = 0; i <= samples; ++i) {
            const double ell = lo + i * kCurveStep;
            rows.emplace_back(name, ell, fn(ell));
        }
    };
    if (results.contains("exact_probability")) {
        const double p = results.at("exact_probability").get<double>();
        const double theta = 2.0 * std::asin(std::sqrt(p));
        sample("exact", [=](double ell) { return oscillation(theta, ell); });
    }
    if (results.contains("fits")) {
        const Json &noise = results.at("fits").at("noise");
        const double theta = noise.at("theta"), a = noise.at("a"), f = noise.at("f");
        sample("fitted-noise", [=](double ell) { return predict(theta, ell, a, f); });
        const double sine = results.at("fits").at("sine").at("theta");
        sample("fitted-sine", [=](double ell) { return oscillation(sine, ell); });
    }
    return rows;
}

std::string cmd_plotdata(const Inputs &in) {
    std::ifstream file(in.report);
    if (!file) {
        throw Error(ErrorKind::parse_error, "cannot open report " + in.report);
    }
    Json report;
    try {
        report = Json::parse(file);
    } catch (const Json::exception &e) {
        throw Error(ErrorKind::parse_error, std::string("report: ") + e.what());
    }
    const Json &results = need(report, "results");
    std::vector<Row> rows;
    if (in.figure == "spread") {
        rows = spread_series(results);
    } else if (in.figure == "resolution") {
        rows = resolution_series(results);
    } else if (in.figure == "curves") {
        rows = curve_series(results);
    } else {
        throw Error(ErrorKind::invalid_argument,
                    "--figure must be spread, resolution or curves");
    }
    std::ostringstream out;
    out << "series,x,y\n" << std::setprecision(17);
    for (const auto &[name, x, y] : rows) {
        out << name << ',' << x << ',' << y << '\n';
    }
    return out.str();
}

void add_common(CLI::App *sub, Common &c, bool model, bool steps) {
    if (model) {
        sub->add_option("--model", c.model, "model file (JSON)")->required();
    }
    if (steps) {
        sub->add_option("--steps", c.steps, "number of time steps")->required();
    }
    sub->add_option("--config", c.config, "configuration, highest node first, x = any");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--shots", c.shots, "shots per circuit");
    sub->add_option("--out", c.out, "write the report here instead of stdout");
}

Json echo_inputs(const std::string &command, const Inputs &in) {
    Json inputs{{"steps", in.common.steps}, {"seed", in.common.seed}};
    if (!in.common.model.empty()) {
        inputs["model_file"] = in.common.model;
        inputs["model"] = model_json(load_model_file(in.common.model));
    }
    if (!in.common.config.empty()) inputs["config"] = in.common.config;
    if (command == "mc") {
        inputs["runs"] = in.runs;
        inputs["repeats"] = in.repeats;
    } else if (command == "circuit") {
        inputs["kind"] = in.kind;
        inputs["lower"] = in.lower;
    } else if (command == "qae") {
        inputs["bits"] = in.bits;
        inputs["shots"] = in.common.shots;
        inputs["marked_step"] = marked_step(in);
    } else if (command == "lowdepth") {
        inputs["schedule"] = parse_schedule(in.schedule);
        inputs["shots"] = in.common.shots;
        inputs["marked_step"] = marked_step(in);
        if (in.decay) inputs["decay"] = *in.decay;
        if (in.error) inputs["error"] = *in.error;
        if (!in.fix_f.empty()) inputs["fix_f"] = in.fix_f;
    } else if (command == "fit") {
        inputs.erase("steps");
        inputs.erase("seed");
        inputs["trace_file"] = in.trace;
        if (!in.fix_f.empty()) inputs["fix_f"] = in.fix_f;
    }
    return inputs;
}

}  // namespace

std::vector<int> parse_schedule(const std::string &text) {
    auto number = [&](const std::string &s) {
        std::size_t used = 0;
        int v = -1;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != s.size() || v < 0) {
            throw Error(ErrorKind::parse_error, "bad schedule entry '" + s + "'");
        }
        return v;
    };
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = number(text.substr(0, dots));
        const int hi = number(text.substr(dots + 2));
        if (hi < lo) {
            throw Error(ErrorKind::parse_error, "schedule range '" + text + "' is empty");
        }
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        out.push_back(number(item));
    }
    if (out.empty()) {
        throw Error(ErrorKind::parse_error, "schedule is empty");
    }
    return out;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Failure-network probabilities by exact, Monte Carlo and amplitude estimation"};
    app.require_subcommand(1);
    Inputs in;

    auto *exact = app.add_subcommand("exact", "exact configuration probabilities per step");
    add_common(exact, in.common, true, true);

    auto *mc = app.add_subcommand("mc", "Monte Carlo estimates and their spread");
    add_common(mc, in.common, true, true);
    mc->add_option("--runs", in.runs, "runs per estimate (several values allowed)");
    mc->add_option("--repeats", in.repeats, "independent estimates per run count");

    auto *circuit = app.add_subcommand("circuit", "gate listing of the model, Grover or QAE circuit");
    add_common(circuit, in.common, true, true);
    circuit->add_option("--kind", in.kind, "model | grover | qae");
    circuit->add_option("--bits", in.bits, "readout qubits for --kind qae");
    circuit->add_option("--at", in.at, "step of the marked register (default: last)");
    circuit->add_flag("--lower", in.lower, "expand oracles into x and multi-controlled z");
    circuit->add_option("--emit", in.emit, "also write the gate listing to this file");

    auto *qae = app.add_subcommand("qae", "standard amplitude estimation sweep");
    add_common(qae, in.common, true, true);
    qae->add_option("--bits", in.bits, "readout qubits (several values allowed)");
    qae->add_option("--at", in.at, "step of the marked register (default: last)");
    qae->add_flag("--eigenphase", in.eigenphase, "add the Grover eigenphase analysis");

    auto *lowdepth = app.add_subcommand("lowdepth", "low-depth schedule with sine and noise fits");
    add_common(lowdepth, in.common, true, true);
    lowdepth->add_option("--schedule", in.schedule, "Grover powers, e.g. 0..8 or 0,1,2,4");
    lowdepth->add_option("--at", in.at, "step of the marked register (default: last)");
    auto *decay = lowdepth->add_option("--decay", in.decay, "decay rate a per Grover operator");
    lowdepth->add_option("--error", in.error, "error probability per Grover operator")
        ->excludes(decay);
    lowdepth->add_option("--fix-f", in.fix_f, "pin f to a value or to 'marked'");
    lowdepth->add_option("--trace-out", in.trace_out, "also write the counts as a trace file");

    auto *fit = app.add_subcommand("fit", "fit a recorded trace");
    fit->add_option("--trace", in.trace, "trace file with header l,shots,marked")->required();
    fit->add_option("--fix-f", in.fix_f, "pin f to this value");
    fit->add_option("--exact", in.exact, "reference probability kept for plotting");
    fit->add_option("--out", in.common.out, "write the report here instead of stdout");

    auto *plot = app.add_subcommand("plotdata", "x/y series from a report");
    plot->add_option("--report", in.report, "report written by another command")->required();
    plot->add_option("--figure", in.figure, "spread | resolution | curves")->required();
    plot->add_option("--out", in.common.out, "write the series here instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        CLI::App *sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        std::string text;
        if (name == "plotdata") {
            text = cmd_plotdata(in);
        } else {
            Json results;
            if (name == "exact") results = cmd_exact(in);
            else if (name == "mc") results = cmd_mc(in);
            else if (name == "circuit") results = cmd_circuit(in);
            else if (name == "qae") results = cmd_qae(in);
            else if (name == "lowdepth") results = cmd_lowdepth(in);
            else results = cmd_fit(in);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            Json report{{"command", name},
                        {"report_version", kReportVersion},
                        {"inputs", echo_inputs(name, in)},
                        {"results", results},
                        {"meta", {{"wall_clock_seconds", elapsed.count()}}}};
            text = report.dump(2) + "\n";
        }
        if (in.common.out.empty()) {
            out << text;
        } else {
            write_text(in.common.out, text);
        }
        return 0;
    } catch (const Error &e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace qnet::cli
