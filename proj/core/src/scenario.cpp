#include "timexec/scenario.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "timexec/closed_form.hpp"
#include "timexec/discrete.hpp"
#include "timexec/errors.hpp"
#include "timexec/quadrature.hpp"

namespace timexec {

using nlohmann::json;

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

constexpr int kDefaultGrid = 400;
constexpr const char* kGridEnvVar = "TIMEXEC_QUAD_GRID";

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

/* ------------------------------------------------------------------ */
/* config parsing                                                      */
/* ------------------------------------------------------------------ */

// Collects every problem instead of stopping at the first, so `validate`
// can print a complete diagnosis of a config in one pass.
struct Parser {
    std::vector<std::string>& diags;

    void fail(const std::string& field, const std::string& msg) {
        diags.push_back(field + ": " + msg);
    }

    void reject_unknown(const json& obj, const char* scope,
                        std::initializer_list<const char*> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool known = false;
            for (const char* a : allowed)
                if (it.key() == a) { known = true; break; }
            if (!known)
                fail(std::string(scope) + "." + it.key(), "unknown field");
        }
    }

    bool number(const json& obj, const char* scope, const char* key, double& dst,
                bool required, double fallback) {
        const std::string field = std::string(scope) + "." + key;
        if (!obj.contains(key)) {
            if (required) fail(field, "required field is missing");
            dst = fallback;
            return !required;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) { fail(field, "must be a number"); return false; }
        dst = v.get<double>();
        if (!std::isfinite(dst)) { fail(field, "must be finite"); return false; }
        return true;
    }

    bool integer(const json& obj, const char* scope, const char* key, int& dst,
                 bool required, int fallback) {
        const std::string field = std::string(scope) + "." + key;
        if (!obj.contains(key)) {
            if (required) fail(field, "required field is missing");
            dst = fallback;
            return !required;
        }
        const json& v = obj.at(key);
        if (!v.is_number_integer()) { fail(field, "must be an integer"); return false; }
        dst = v.get<int>();
        return true;
    }

    bool boolean(const json& obj, const char* scope, const char* key, bool& dst) {
        if (!obj.contains(key)) return true;
        const json& v = obj.at(key);
        if (!v.is_boolean()) {
            fail(std::string(scope) + "." + key, "must be true or false");
            return false;
        }
        dst = v.get<bool>();
        return true;
    }
};

void parse_kernel(Parser& p, const json& root, ScenarioConfig& cfg) {
    if (!root.contains("kernel")) { p.fail("kernel", "required field is missing"); return; }
    const json& k = root.at("kernel");
    if (!k.is_object()) { p.fail("kernel", "must be an object"); return; }
    if (!k.contains("type") || !k.at("type").is_string()) {
        p.fail("kernel.type", "must be one of exponential, power-law, "
                              "regularized-power-law, constant");
        return;
    }
    const std::string type = k.at("type").get<std::string>();
    double v = 0.0;
    if (type == "exponential") {
        p.reject_unknown(k, "kernel", {"type", "rho"});
        if (p.number(k, "kernel", "rho", v, true, 0.0) && !(v > 0.0))
            p.fail("kernel.rho", "must be > 0");
        cfg.kernel = Exponential{v};
    } else if (type == "power-law") {
        p.reject_unknown(k, "kernel", {"type", "kappa"});
        if (p.number(k, "kernel", "kappa", v, true, 0.0) && !(v > 0.0 && v < 1.0))
            p.fail("kernel.kappa", "must lie in (0, 1)");
        cfg.kernel = PowerLaw{v};
    } else if (type == "regularized-power-law") {
        p.reject_unknown(k, "kernel", {"type", "kappa", "c"});
        double c = 2.0;
        if (p.number(k, "kernel", "kappa", v, true, 0.0) && !(v > 0.0))
            p.fail("kernel.kappa", "must be > 0");
        if (p.number(k, "kernel", "c", c, false, 2.0) && !(c > 0.0))
            p.fail("kernel.c", "must be > 0");
        cfg.kernel = RegularizedPowerLaw{v, c};
    } else if (type == "constant") {
        p.reject_unknown(k, "kernel", {"type", "level"});
        if (p.number(k, "kernel", "level", v, true, 0.0) && !(v > 0.0))
            p.fail("kernel.level", "must be > 0");
        cfg.kernel = Constant{v};
    } else {
        p.fail("kernel.type", "unknown kernel '" + type + "'");
    }
}

void parse_benchmark(Parser& p, const json& root, ScenarioConfig& cfg) {
    if (!root.contains("benchmark")) return;  // default: vwap, full window
    const json& b = root.at("benchmark");
    if (!b.is_object()) { p.fail("benchmark", "must be an object"); return; }
    p.reject_unknown(b, "benchmark", {"type", "window"});

    std::string type = "vwap";
    if (b.contains("type")) {
        if (!b.at("type").is_string()) { p.fail("benchmark.type", "must be a string"); return; }
        type = b.at("type").get<std::string>();
    }
    if (type == "vwap") cfg.benchmark = BenchmarkType::vwap;
    else if (type == "twap") cfg.benchmark = BenchmarkType::twap;
    else if (type == "is") cfg.benchmark = BenchmarkType::is;
    else if (type == "target-close") cfg.benchmark = BenchmarkType::target_close;
    else { p.fail("benchmark.type", "must be one of vwap, twap, is, target-close"); return; }

    if (!b.contains("window")) return;
    if (cfg.benchmark == BenchmarkType::is || cfg.benchmark == BenchmarkType::target_close) {
        p.fail("benchmark.window", "not allowed for '" + type +
                                   "' (the window is implied by the benchmark type)");
        return;
    }
    const json& w = b.at("window");
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
        p.fail("benchmark.window", "must be an array of two numbers");
        return;
    }
    if (cfg.mode == ScenarioMode::discrete) {
        if (!w[0].is_number_integer() || !w[1].is_number_integer()) {
            p.fail("benchmark.window", "bucket indices must be integers in discrete mode");
            return;
        }
        const int l1 = w[0].get<int>(), l2 = w[1].get<int>();
        if (l1 > l2) { p.fail("benchmark.window", "l1 > l2"); return; }
        if (l1 < 1 || l2 > cfg.N) {
            p.fail("benchmark.window", "must lie inside [1, N]");
            return;
        }
        cfg.window_buckets = {l1, l2};
    } else {
        const double t1 = w[0].get<double>(), t2 = w[1].get<double>();
        if (t1 > t2) { p.fail("benchmark.window", "l1 > l2"); return; }
        if (!(0.0 <= t1) || !(t2 <= cfg.T)) {
            p.fail("benchmark.window", "must lie inside [0, T]");
            return;
        }
        if (t1 == t2) {
            p.fail("benchmark.window", "zero-length window; use benchmark type 'is' or "
                                       "'target-close' for point benchmarks");
            return;
        }
        cfg.window_times = {t1, t2};
    }
}

void parse_sigma(Parser& p, const json& root, ScenarioConfig& cfg) {
    cfg.Sigma = Eigen::MatrixXd::Identity(cfg.N, cfg.N);
    if (!root.contains("sigma")) return;
    const json& s = root.at("sigma");
    if (!s.is_object()) { p.fail("sigma", "must be an object"); return; }
    p.reject_unknown(s, "sigma", {"diagonal", "matrix_file"});
    if (s.contains("diagonal") == s.contains("matrix_file")) {
        p.fail("sigma", "provide exactly one of 'diagonal' or 'matrix_file'");
        return;
    }
    if (s.contains("diagonal")) {
        double d = 0.0;
        if (p.number(s, "sigma", "diagonal", d, true, 0.0)) {
            if (!(d > 0.0)) p.fail("sigma.diagonal", "must be > 0");
            else cfg.Sigma = d * Eigen::MatrixXd::Identity(cfg.N, cfg.N);
        }
        return;
    }
    if (!s.at("matrix_file").is_string()) {
        p.fail("sigma.matrix_file", "must be a path string");
        return;
    }
    const std::string path = s.at("matrix_file").get<std::string>();
    std::ifstream in(path);
    if (!in) { p.fail("sigma.matrix_file", "cannot open '" + path + "'"); return; }
    Eigen::MatrixXd S(cfg.N, cfg.N);
    for (int i = 0; i < cfg.N; ++i)
        for (int j = 0; j < cfg.N; ++j)
            if (!(in >> S(i, j))) {
                p.fail("sigma.matrix_file",
                       "expected " + std::to_string(cfg.N * cfg.N) + " numbers in '" +
                           path + "'");
                return;
            }
    if ((S - S.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(S.cwiseAbs().maxCoeff(), 1.0)) {
        p.fail("sigma.matrix_file", "matrix is not symmetric");
        return;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
        p.fail("sigma.matrix_file", "matrix is not positive definite");
        return;
    }
    cfg.Sigma = S;
}

void parse_drift(Parser& p, const json& root, ScenarioConfig& cfg) {
    cfg.mu = Eigen::VectorXd::Zero(cfg.N);
    if (!root.contains("drift")) return;
    const json& d = root.at("drift");
    if (d.is_number()) {
        const double v = d.get<double>();
        if (!std::isfinite(v)) { p.fail("drift", "must be finite"); return; }
        cfg.mu.setConstant(v);
        return;
    }
    if (!d.is_array()) { p.fail("drift", "must be a number or an array of N numbers"); return; }
    if (static_cast<int>(d.size()) != cfg.N) {
        p.fail("drift", "array must have N = " + std::to_string(cfg.N) + " entries");
        return;
    }
    for (int i = 0; i < cfg.N; ++i) {
        if (!d[i].is_number() || !std::isfinite(d[i].get<double>())) {
            p.fail("drift", "entries must be finite numbers");
            return;
        }
        cfg.mu[i] = d[i].get<double>();
    }
}

// Returns the parsed per-entry volume values, or nullopt for a flat profile.
void parse_volume(Parser& p, const json& root, ScenarioConfig& cfg) {
    double flat = 1.0;
    std::optional<std::vector<double>> values;
    if (root.contains("volume")) {
        const json& v = root.at("volume");
        if (!v.is_object()) { p.fail("volume", "must be an object"); return; }
        p.reject_unknown(v, "volume", {"flat", "values"});
        if (v.contains("flat") == v.contains("values")) {
            p.fail("volume", "provide exactly one of 'flat' or 'values'");
            return;
        }
        if (v.contains("flat")) {
            if (p.number(v, "volume", "flat", flat, true, 1.0) && !(flat > 0.0)) {
                p.fail("volume.flat", "must be > 0");
                return;
            }
        } else {
            if (!v.at("values").is_array()) {
                p.fail("volume.values", "must be an array of positive numbers");
                return;
            }
            std::vector<double> out;
            for (const auto& e : v.at("values")) {
                if (!e.is_number() || !(e.get<double>() > 0.0) ||
                    !std::isfinite(e.get<double>())) {
                    p.fail("volume.values", "entries must be positive finite numbers");
                    return;
                }
                out.push_back(e.get<double>());
            }
            values = std::move(out);
        }
    }

    if (values && cfg.benchmark == BenchmarkType::twap) {
        p.fail("volume.values",
               "twap is vwap with flat volume; drop the values or use type vwap");
        return;
    }

    if (cfg.mode == ScenarioMode::discrete) {
        if (values && static_cast<int>(values->size()) != cfg.N) {
            p.fail("volume.values", "array must have N = " + std::to_string(cfg.N) +
                                        " entries");
            return;
        }
        cfg.volume = values
                         ? Eigen::Map<const Eigen::VectorXd>(values->data(), cfg.N).eval()
                         : Eigen::VectorXd::Constant(cfg.N, flat).eval();
    } else if (cfg.mode == ScenarioMode::quadrature) {
        if (values) {
            if (cfg.benchmark != BenchmarkType::vwap) {
                p.fail("volume.values", "sampled volume applies to the vwap benchmark only");
                return;
            }
            if (cfg.window_times) {
                p.fail("volume.values", "provide either a window with flat volume or a "
                                        "full-horizon sampled profile, not both");
                return;
            }
            if (cfg.grid <= 0) {
                p.fail("volume.values",
                       "sampled volume needs an explicit 'grid' matching its length");
                return;
            }
            if (static_cast<int>(values->size()) != cfg.grid) {
                p.fail("volume.values", "array must have grid = " +
                                            std::to_string(cfg.grid) + " entries");
                return;
            }
            cfg.volume_values = std::move(values);
        }
    } else if (root.contains("volume")) {
        p.fail("volume", "closed-form mode has flat-volume solutions only");
    }
}

void parse_constraints(Parser& p, const json& root, ScenarioConfig& cfg) {
    if (!root.contains("constraints")) return;
    const json& c = root.at("constraints");
    if (!c.is_object()) { p.fail("constraints", "must be an object"); return; }
    p.reject_unknown(c, "constraints", {"nonneg", "max_speed"});
    p.boolean(c, "constraints", "nonneg", cfg.nonneg);
    if (c.contains("max_speed")) {
        double v = 0.0;
        if (p.number(c, "constraints", "max_speed", v, true, 0.0)) {
            if (!(v > 0.0)) p.fail("constraints.max_speed", "must be > 0");
            else cfg.max_speed = v;
        }
    }
}

void parse_sweep(Parser& p, const json& root, ScenarioConfig& cfg) {
    if (!root.contains("sweep")) return;
    const json& s = root.at("sweep");
    if (!s.is_object()) { p.fail("sweep", "must be an object"); return; }
    p.reject_unknown(s, "sweep", {"parameter", "values"});
    if (!s.contains("parameter") || !s.at("parameter").is_string()) {
        p.fail("sweep.parameter", "must be one of gamma, drift, x0");
        return;
    }
    const std::string param = s.at("parameter").get<std::string>();
    if (param != "gamma" && param != "drift" && param != "x0") {
        p.fail("sweep.parameter", "must be one of gamma, drift, x0");
        return;
    }
    if (!s.contains("values") || !s.at("values").is_array() || s.at("values").empty()) {
        p.fail("sweep.values", "must be a non-empty array of numbers");
        return;
    }
    std::vector<double> values;
    for (const auto& e : s.at("values")) {
        if (!e.is_number() || !std::isfinite(e.get<double>())) {
            p.fail("sweep.values", "entries must be finite numbers");
            return;
        }
        if (param == "gamma" && e.get<double>() < 0.0) {
            p.fail("sweep.values", "gamma values must be >= 0");
            return;
        }
        values.push_back(e.get<double>());
    }
    cfg.sweep = SweepSpec{param, std::move(values)};
}

ScenarioConfig parse_impl(const std::string& text, std::vector<std::string>& diags) {
    ScenarioConfig cfg;
    Parser p{diags};

    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        p.fail("config", std::string("not valid JSON (") + e.what() + ")");
        return cfg;
    }
    if (!root.is_object()) { p.fail("config", "top level must be an object"); return cfg; }

    // mode first: it decides which other fields are meaningful
    if (!root.contains("mode") || !root.at("mode").is_string()) {
        p.fail("mode", "must be one of closed-form, quadrature, discrete");
        return cfg;
    }
    const std::string mode = root.at("mode").get<std::string>();
    if (mode == "closed-form") cfg.mode = ScenarioMode::closed_form;
    else if (mode == "quadrature") cfg.mode = ScenarioMode::quadrature;
    else if (mode == "discrete") cfg.mode = ScenarioMode::discrete;
    else {
        p.fail("mode", "unknown mode '" + mode + "'");
        return cfg;
    }
    const bool discrete = cfg.mode == ScenarioMode::discrete;

    p.reject_unknown(root, "config",
                     {"mode", "kernel", "x0", "T", "grid", "N", "tau", "k", "S0",
                      "benchmark", "gamma", "drift", "sigma", "volume", "constraints",
                      "include_own_volume", "sweep"});
    if (discrete) {
        for (const char* key : {"T", "grid"})
            if (root.contains(key))
                p.fail(std::string("config.") + key,
                       "not used in discrete mode (the horizon is N*tau)");
    } else {
        for (const char* key : {"N", "tau", "k", "S0", "gamma", "drift", "sigma",
                                "constraints", "include_own_volume", "sweep"})
            if (root.contains(key))
                p.fail(std::string("config.") + key, "only valid in discrete mode");
    }

    parse_kernel(p, root, cfg);
    p.number(root, "config", "x0", cfg.x0, true, 0.0);

    if (discrete) {
        if (p.integer(root, "config", "N", cfg.N, true, 0) && cfg.N < 1)
            p.fail("config.N", "must be >= 1");
        if (p.number(root, "config", "tau", cfg.tau, false, 1.0) && !(cfg.tau > 0.0))
            p.fail("config.tau", "must be > 0");
        if (p.number(root, "config", "k", cfg.k, false, 1.0) && !(cfg.k > 0.0))
            p.fail("config.k", "must be > 0");
        p.number(root, "config", "S0", cfg.S0, false, 0.0);
        if (p.number(root, "config", "gamma", cfg.gamma, false, 0.0) && !(cfg.gamma >= 0.0))
            p.fail("config.gamma", "must be >= 0");
        if (cfg.N >= 1) {
            cfg.T = cfg.N * cfg.tau;
            parse_benchmark(p, root, cfg);
            parse_sigma(p, root, cfg);
            parse_drift(p, root, cfg);
            parse_volume(p, root, cfg);
        }
        parse_constraints(p, root, cfg);
        parse_sweep(p, root, cfg);
        p.boolean(root, "config", "include_own_volume", cfg.include_own_volume);
        if (cfg.include_own_volume) {
            if (cfg.benchmark == BenchmarkType::is)
                p.fail("include_own_volume",
                       "needs a benchmark window; the is benchmark has none");
            if (cfg.volume.size()) {
                const double v0 = cfg.volume[0];
                if (((cfg.volume.array() - v0).abs() > 1e-12 * std::max(v0, 1.0)).any())
                    p.fail("include_own_volume", "requires a flat volume profile");
            }
        }
    } else {
        if (p.number(root, "config", "T", cfg.T, true, 1.0) && !(cfg.T > 0.0))
            p.fail("config.T", "must be > 0");
        if (p.integer(root, "config", "grid", cfg.grid, false, 0) && cfg.grid != 0 &&
            cfg.grid < 4)
            p.fail("config.grid", "must be >= 4");
        parse_benchmark(p, root, cfg);
        parse_volume(p, root, cfg);

        if (cfg.mode == ScenarioMode::closed_form) {
            if (cfg.window_times)
                p.fail("benchmark.window",
                       "closed-form solutions cover the full horizon only; use "
                       "quadrature mode for sub-windows");
            const bool pl = std::holds_alternative<PowerLaw>(cfg.kernel);
            const bool expo = std::holds_alternative<Exponential>(cfg.kernel);
            if (!pl && !expo)
                p.fail("kernel.type",
                       "closed forms exist for power-law and exponential kernels only");
            if (expo && (cfg.benchmark == BenchmarkType::is ||
                         cfg.benchmark == BenchmarkType::target_close))
                p.fail("benchmark.type",
                       "exponential-kernel closed form covers vwap/twap only; use "
                       "quadrature mode");
        }
    }
    return cfg;
}

/* ------------------------------------------------------------------ */
/* output assembly                                                     */
/* ------------------------------------------------------------------ */

json kernel_json(const DecayKernel& g) {
    return std::visit(
        [](const auto& k) -> json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Exponential>)
                return {{"type", "exponential"}, {"rho", k.rho}};
            else if constexpr (std::is_same_v<K, PowerLaw>)
                return {{"type", "power-law"}, {"kappa", k.kappa}};
            else if constexpr (std::is_same_v<K, RegularizedPowerLaw>)
                return {{"type", "regularized-power-law"}, {"kappa", k.kappa}, {"c", k.c}};
            else
                return {{"type", "constant"}, {"level", k.level}};
        },
        g);
}

const char* benchmark_name(BenchmarkType b) {
    switch (b) {
        case BenchmarkType::vwap: return "vwap";
        case BenchmarkType::twap: return "twap";
        case BenchmarkType::is: return "is";
        default: return "target-close";
    }
}

json benchmark_json(const ScenarioConfig& cfg) {
    json b{{"type", benchmark_name(cfg.benchmark)}};
    if (cfg.window_buckets)
        b["window"] = {cfg.window_buckets->first, cfg.window_buckets->second};
    else if (cfg.window_times)
        b["window"] = {cfg.window_times->first, cfg.window_times->second};
    return b;
}

std::string csv_row(double a, double b, int impulse) {
    return format_sig(a) + "," + format_sig(b) + "," + std::to_string(impulse) + "\n";
}

constexpr const char* kCsvHeader = "index_or_time,rate_or_shares,impulse_flag\n";

/* ------------------------------------------------------------------ */
/* discrete mode                                                       */
/* ------------------------------------------------------------------ */

std::optional<BenchmarkWindow> discrete_window(const ScenarioConfig& cfg) {
    switch (cfg.benchmark) {
        case BenchmarkType::is: return std::nullopt;
        case BenchmarkType::target_close: return BenchmarkWindow{cfg.N, cfg.N};
        default:
            if (cfg.window_buckets)
                return BenchmarkWindow{cfg.window_buckets->first, cfg.window_buckets->second};
            return BenchmarkWindow::full(cfg.N);
    }
}

MarketModel discrete_model(const ScenarioConfig& cfg) {
    MarketModel m;
    m.k = cfg.k;
    m.tau = cfg.tau;
    m.N = cfg.N;
    m.mu = cfg.mu;
    m.Sigma = cfg.Sigma;
    // twap forces a flat volume at parse time, so eta comes out time-flat here
    m.volume = cfg.volume;
    m.S0 = cfg.S0;
    return m;
}

SolveReport solve_discrete(const ScenarioConfig& cfg, const MarketModel& model) {
    std::optional<Eigen::VectorXd> lower, upper;
    if (cfg.nonneg) lower = Eigen::VectorXd::Zero(cfg.N).eval();
    if (cfg.max_speed)
        upper = Eigen::VectorXd::Constant(cfg.N, *cfg.max_speed * cfg.tau).eval();
    return optimize_schedule(model, cfg.kernel, discrete_window(cfg), cfg.gamma, cfg.x0,
                             lower, upper, false, cfg.include_own_volume);
}

double center_of_mass(const Eigen::VectorXd& x, double x0) {
    double acc = 0.0;
    for (int i = 0; i < x.size(); ++i) acc += (i + 1) * x[i];
    return x0 != 0.0 ? acc / x0 : 0.0;
}

ScenarioOutput run_discrete(const ScenarioConfig& cfg) {
    const MarketModel model = discrete_model(cfg);
    const SolveReport r = solve_discrete(cfg, model);

    std::string csv = kCsvHeader;
    for (int i = 0; i < cfg.N; ++i) csv += csv_row(i + 1, r.schedule[i], 0);

    json active = json::array();
    for (int i : r.active_set) active.push_back(i);
    json report{
        {"mode", "discrete"},
        {"kernel", kernel_json(cfg.kernel)},
        {"benchmark", benchmark_json(cfg)},
        {"parameters",
         {{"N", cfg.N}, {"tau", cfg.tau}, {"k", cfg.k}, {"x0", cfg.x0},
          {"gamma", cfg.gamma}, {"S0", cfg.S0},
          {"include_own_volume", cfg.include_own_volume},
          {"nonneg", cfg.nonneg},
          {"max_speed", cfg.max_speed ? json(*cfg.max_speed) : json(nullptr)}}},
        {"objective", r.objective},
        {"multiplier", r.multiplier},
        {"excess_profit", r.expected_excess_profit},
        {"utility", r.utility},
        {"kkt_residual", r.kkt_residual},
        {"active_set", active},
        {"budget", r.schedule.sum()},
    };

    ScenarioOutput out;
    out.schedule_csv = std::move(csv);

    if (cfg.sweep) {
        std::string sweep =
            "parameter,value,objective,multiplier,excess_profit,utility,kkt_residual,"
            "min_bucket,max_bucket,center_of_mass\n";
        for (double v : cfg.sweep->values) {
            ScenarioConfig c = cfg;
            c.sweep.reset();
            if (cfg.sweep->parameter == "gamma") c.gamma = v;
            else if (cfg.sweep->parameter == "drift") c.mu.setConstant(v);
            else c.x0 = v;
            const SolveReport s = solve_discrete(c, discrete_model(c));
            sweep += cfg.sweep->parameter;
            sweep += "," + format_sig(v);
            sweep += "," + format_sig(s.objective);
            sweep += "," + format_sig(s.multiplier);
            sweep += "," + format_sig(s.expected_excess_profit);
            sweep += "," + format_sig(s.utility);
            sweep += "," + format_sig(s.kkt_residual);
            sweep += "," + format_sig(s.schedule.minCoeff());
            sweep += "," + format_sig(s.schedule.maxCoeff());
            sweep += "," + format_sig(center_of_mass(s.schedule, c.x0));
            sweep += "\n";
        }
        out.sweep_csv = std::move(sweep);
        report["sweep"] = {{"parameter", cfg.sweep->parameter},
                           {"rows", cfg.sweep->values.size()}};
    }

    out.report_json = report.dump(2) + "\n";
    return out;
}

/* ------------------------------------------------------------------ */
/* quadrature mode                                                     */
/* ------------------------------------------------------------------ */

int resolve_grid(const ScenarioConfig& cfg, std::string& source) {
    if (cfg.grid > 0) {
        source = "config";
        return cfg.grid;
    }
    if (const char* env = std::getenv(kGridEnvVar)) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 4)
            throw config_error(std::string(kGridEnvVar) + ": must be an integer >= 4, got '" +
                               env + "'");
        source = "environment";
        return static_cast<int>(v);
    }
    source = "default";
    return kDefaultGrid;
}

ScenarioOutput run_quadrature(const ScenarioConfig& cfg) {
    std::string grid_source;
    const int N = resolve_grid(cfg, grid_source);

    IntegralEquationSpec spec;
    switch (cfg.benchmark) {
        case BenchmarkType::is:
            spec = IntegralEquationSpec::pre_trade(cfg.kernel, cfg.x0, cfg.T, N);
            break;
        case BenchmarkType::target_close:
            spec = IntegralEquationSpec::at_close(cfg.kernel, cfg.x0, cfg.T, N);
            break;
        default: {
            if (cfg.volume_values) {
                // normalize the sampled profile to unit mass over the horizon
                const double tau = cfg.T / N;
                double total = 0.0;
                for (double v : *cfg.volume_values) total += v * tau;
                std::vector<double> eta(cfg.volume_values->size());
                for (std::size_t i = 0; i < eta.size(); ++i)
                    eta[i] = (*cfg.volume_values)[i] / total;
                spec = IntegralEquationSpec{cfg.kernel, cfg.x0, cfg.T, N,
                                            SampledProfile{std::move(eta)}};
            } else {
                const double t1 = cfg.window_times ? cfg.window_times->first : 0.0;
                const double t2 = cfg.window_times ? cfg.window_times->second : cfg.T;
                spec = IntegralEquationSpec::flat_window(cfg.kernel, cfg.x0, cfg.T, N, t1, t2);
            }
        }
    }

    const QuadratureSolution sol = solve_optimal_velocity(spec);

    std::string csv = kCsvHeader;
    for (int i = 0; i < N; ++i) csv += csv_row(sol.grid[i], sol.velocity[i], 0);

    json report{
        {"mode", "quadrature"},
        {"kernel", kernel_json(cfg.kernel)},
        {"benchmark", benchmark_json(cfg)},
        {"parameters",
         {{"T", cfg.T}, {"x0", cfg.x0}, {"grid", N}, {"grid_source", grid_source}}},
        {"objective", nullptr},
        {"multiplier", sol.lambda},
        {"excess_profit", nullptr},
        {"utility", nullptr},
        {"kkt_residual", sol.residual},
        {"mass", sol.mass()},
    };

    ScenarioOutput out;
    out.schedule_csv = std::move(csv);
    out.report_json = report.dump(2) + "\n";
    return out;
}

/* ------------------------------------------------------------------ */
/* closed-form mode                                                    */
/* ------------------------------------------------------------------ */

ContinuousSchedule closed_form_schedule(const ScenarioConfig& cfg) {
    const double x0 = cfg.x0, T = cfg.T;
    if (const auto* e = std::get_if<Exponential>(&cfg.kernel))
        return vwap_exponential_schedule(x0, T, e->rho);
    const double kappa = std::get<PowerLaw>(cfg.kernel).kappa;
    switch (cfg.benchmark) {
        case BenchmarkType::is:
            return ContinuousSchedule{
                0.0, 0.0, [x0, T, kappa](double t) { return is_powerlaw_rate(x0, T, kappa, t); },
                T, x0};
        case BenchmarkType::target_close:
            return target_close_decomposition(x0, T, cfg.kernel);
        default:
            return ContinuousSchedule{
                0.0, 0.0,
                [x0, T, kappa](double t) { return vwap_powerlaw_rate(x0, T, kappa, t); }, T,
                x0};
    }
}

ScenarioOutput run_closed_form(const ScenarioConfig& cfg) {
    const ContinuousSchedule sched = closed_form_schedule(cfg);
    const int M = cfg.grid > 0 ? cfg.grid : kDefaultGrid;
    const double tau = cfg.T / M;

    // Cell averages keep the exported masses exact even though the rates
    // diverge at the endpoints (the divergences are integrable).
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    const double hi = std::nextafter(cfg.T, 0.0);
    auto guarded = [&sched, hi](double t) {
        if (t <= 0.0) t = std::numeric_limits<double>::min();
        if (t > hi) t = hi;
        return sched.rate(t);
    };

    std::string csv = kCsvHeader;
    if (sched.initial_impulse != 0.0) csv += csv_row(0.0, sched.initial_impulse, 1);
    double interior = 0.0;
    for (int i = 0; i < M; ++i) {
        const double a = i * tau, b = (i + 1) * tau;
        const double cell = integrator.integrate(guarded, a, b, 1e-10);
        interior += cell;
        csv += csv_row((i + 0.5) * tau, cell / tau, 0);
    }
    if (sched.terminal_impulse != 0.0) csv += csv_row(cfg.T, sched.terminal_impulse, 1);

    // endpoint deltas deliver half their coefficient inside [0, T]
    const double total =
        interior + 0.5 * sched.initial_impulse + 0.5 * sched.terminal_impulse;

    json report{
        {"mode", "closed-form"},
        {"kernel", kernel_json(cfg.kernel)},
        {"benchmark", benchmark_json(cfg)},
        {"parameters", {{"T", cfg.T}, {"x0", cfg.x0}, {"grid", M}}},
        {"objective", nullptr},
        {"multiplier", nullptr},
        {"excess_profit", nullptr},
        {"utility", nullptr},
        {"kkt_residual", nullptr},
        {"impulses",
         {{"initial", sched.initial_impulse}, {"terminal", sched.terminal_impulse}}},
        {"interior_mass", interior},
        {"total_mass", total},
    };

    ScenarioOutput out;
    out.schedule_csv = std::move(csv);
    out.report_json = report.dump(2) + "\n";
    return out;
}

}  // namespace

std::vector<std::string> scenario_diagnostics(const std::string& json_text) {
    std::vector<std::string> diags;
    parse_impl(json_text, diags);
    return diags;
}

ScenarioConfig parse_scenario(const std::string& json_text) {
    std::vector<std::string> diags;
    ScenarioConfig cfg = parse_impl(json_text, diags);
    if (!diags.empty()) throw config_error(join(diags, "; "));
    return cfg;
}

ScenarioOutput run_scenario(const ScenarioConfig& cfg) {
    switch (cfg.mode) {
        case ScenarioMode::discrete: return run_discrete(cfg);
        case ScenarioMode::quadrature: return run_quadrature(cfg);
        default: return run_closed_form(cfg);
    }
}

}  // namespace timexec
