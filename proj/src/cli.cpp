#include "spiked/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "spiked/clt.hpp"
#include "spiked/density.hpp"
#include "spiked/ensemble.hpp"
#include "spiked/hypmatrix.hpp"
#include "spiked/jack.hpp"

namespace spiked::cli {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void json17(const json& j, std::ostream& os, int indent) {
    const std::string pad(indent, ' ');
    const std::string pad2(indent + 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad2 << json(it.key()).dump() << ": ";
                json17(it.value(), os, indent + 2);
            }
            os << "\n" << pad << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad2;
                json17(j[i], os, indent + 2);
            }
            os << "\n" << pad << "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v))
                os << format_double(v);
            else
                os << "null";
            return;
        }
        default:
            os << j.dump();
            return;
    }
}

void csv_rows(const json& j, const std::string& prefix, std::ostream& os) {
    auto emit = [&](const std::string& key, const json& leaf) {
        os << key << ",";
        if (leaf.is_number_float()) {
            const double v = leaf.get<double>();
            os << (std::isfinite(v) ? format_double(v) : "");
        } else if (leaf.is_string()) {
            std::string s = leaf.get<std::string>();
            const bool quote = s.find(',') != std::string::npos || s.find('"') != std::string::npos;
            if (quote) {
                std::string q = "\"";
                for (char c : s) q += (c == '"') ? "\"\"" : std::string(1, c);
                q += "\"";
                s = q;
            }
            os << s;
        } else if (!leaf.is_null()) {
            os << leaf.dump();
        }
        os << "\n";
    };
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            csv_rows(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            csv_rows(j[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        emit(prefix, j);
    }
}

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

int get_int(const json& obj, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
    return obj[key].get<int>();
}

double get_num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(std::string(key) + ": expected a number");
    return obj[key].get<double>();
}

std::vector<double> split_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + item + "'");
        }
    }
    return out;
}

struct NumericOptions {
    int quad_n = 128;
    int series_k = 60;
    int contour_nodes = 256;
    int trials = 2000;
    std::uint64_t seed = 1;
    int workers = 1;
};

NumericOptions numeric_from_config(const json& cfg) {
    NumericOptions n;
    if (!cfg.contains("numeric")) return n;
    const json& j = cfg["numeric"];
    n.quad_n = get_int(j, "quad_n", n.quad_n);
    n.series_k = get_int(j, "series_k", n.series_k);
    n.contour_nodes = get_int(j, "contour_nodes", n.contour_nodes);
    n.trials = get_int(j, "trials", n.trials);
    n.workers = get_int(j, "workers", n.workers);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) throw ConfigError("seed: expected an integer");
        n.seed = j["seed"].get<std::uint64_t>();
    }
    if (n.quad_n < 2) throw ConfigError("quad_n: must be >= 2");
    if (n.series_k < 1) throw ConfigError("series_k: must be >= 1");
    if (n.trials < 1) throw ConfigError("trials: must be >= 1");
    if (n.workers < 1) throw ConfigError("workers: must be >= 1");
    return n;
}

json spikes_to_json(const std::vector<Spike>& spikes) {
    json arr = json::array();
    for (const auto& s : spikes) arr.push_back({{"value", s.value}, {"multiplicity", s.multiplicity}});
    return arr;
}

json model_to_json(const SpikedModel& m) {
    json j{{"kind", to_string(m.kind)}, {"n", m.n}, {"spikes", spikes_to_json(m.spikes)}};
    if (m.kind == ModelKind::C) {
        j["m1"] = m.m1;
        j["m2"] = m.m2;
    } else {
        j["m"] = m.m;
    }
    return j;
}

json clt_to_json(const SpikedModel& model, const CLTResult& r) {
    const SupportInterval s = support(model);
    json spikes = json::array();
    for (const auto& sc : r.spikes) {
        spikes.push_back({{"value", sc.value},
                          {"multiplicity", sc.multiplicity},
                          {"z0", sc.saddle.z0},
                          {"sqrt_branch", sc.saddle.sqrt_branch},
                          {"regime", to_string(sc.saddle.regime)},
                          {"near_critical", sc.saddle.near_critical},
                          {"mu_bar", sc.mu_bar}});
    }
    return json{{"a", s.a},
                {"b", s.b},
                {"mu", r.mu},
                {"sigma2", r.sigma2},
                {"spikes", spikes},
                {"predicted_mean_for_n", r.predicted_mean(model.n)},
                {"predicted_sd", std::sqrt(std::max(0.0, r.sigma2))}};
}

// Gauss-Legendre nodes/weights on (0, 1) by Newton iteration.
void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = w[n - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
    }
}

// Integral of the joint density over its natural cube, by tensor quadrature.
// Models A/B substitute x = s/(1-s) per dimension.
double density_normalization(const SpikedModel& model, int points_per_dim) {
    const int n = model.n;
    std::vector<double> gx, gw;
    gauss_legendre01(points_per_dim, gx, gw);
    const bool unbounded = model.kind != ModelKind::C;

    Eigen::VectorXd eigs(n);
    std::vector<int> idx(n, 0);
    double total = 0.0;
    while (true) {
        double wgt = 1.0;
        for (int d = 0; d < n; ++d) {
            const double s = gx[idx[d]];
            if (unbounded) {
                eigs[d] = s / (1.0 - s);
                wgt *= gw[idx[d]] / ((1.0 - s) * (1.0 - s));
            } else {
                eigs[d] = s;
                wgt *= gw[idx[d]];
            }
        }
        bool coincide = false;
        for (int i = 0; i < n && !coincide; ++i)
            for (int j = i + 1; j < n; ++j)
                if (eigs[i] == eigs[j]) coincide = true;
        if (!coincide) total += wgt * joint_density(model, eigs);
        int d = n - 1;
        while (d >= 0 && ++idx[d] == points_per_dim) idx[d--] = 0;
        if (d < 0) break;
    }
    return total;
}

// Marginal density of one (unordered) eigenvalue, for n <= 3.
double density_marginal(const SpikedModel& model, double x, int points_per_dim) {
    const int n = model.n;
    std::vector<double> gx, gw;
    gauss_legendre01(points_per_dim, gx, gw);
    const bool unbounded = model.kind != ModelKind::C;

    Eigen::VectorXd eigs(n);
    eigs[0] = x;
    if (n == 1) return joint_density(model, eigs);
    std::vector<int> idx(n - 1, 0);
    double total = 0.0;
    while (true) {
        double wgt = 1.0;
        for (int d = 0; d < n - 1; ++d) {
            const double s = gx[idx[d]];
            if (unbounded) {
                eigs[d + 1] = s / (1.0 - s);
                wgt *= gw[idx[d]] / ((1.0 - s) * (1.0 - s));
            } else {
                eigs[d + 1] = s;
                wgt *= gw[idx[d]];
            }
        }
        bool coincide = false;
        for (int i = 0; i < n && !coincide; ++i)
            for (int j = i + 1; j < n; ++j)
                if (eigs[i] == eigs[j]) coincide = true;
        if (!coincide) total += wgt * joint_density(model, eigs);
        int d = n - 2;
        while (d >= 0 && ++idx[d] == points_per_dim) idx[d--] = 0;
        if (d < 0) break;
    }
    return total;
}

struct SelfCheck {
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<SelfCheck> run_selftests();

}  // namespace

std::vector<Spike> parse_spikes(const std::string& text) {
    std::vector<Spike> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        Spike s;
        try {
            s.value = std::stod(item.substr(0, colon));
            s.multiplicity = colon == std::string::npos ? 1 : std::stoi(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse spike '" + item + "' (expected value:multiplicity)");
        }
        out.push_back(s);
    }
    return out;
}

LinearStatistic parse_statistic(const std::string& text) {
    if (text == "x") return LinearStatistic::power(1);
    if (text == "x2") return LinearStatistic::power(2);
    if (text == "log") return LinearStatistic::log();
    if (text.rfind("exp:", 0) == 0) {
        try {
            return LinearStatistic::exponential(std::stod(text.substr(4)));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse statistic '" + text + "'");
        }
    }
    if (text.rfind("poly:", 0) == 0) return LinearStatistic::poly(split_doubles(text.substr(5)));
    throw ConfigError("unknown statistic '" + text + "' (expected x|x2|log|exp:t|poly:...)");
}

SpikedModel model_from_config(const json& cfg) {
    if (!cfg.contains("model")) throw ConfigError("missing 'model' block");
    const json& m = cfg["model"];
    require_keys(m, "model", {"kind", "n", "m", "m1", "m2", "spikes"});
    if (!m.contains("kind") || !m["kind"].is_string()) throw ConfigError("model.kind: required string");
    ModelKind kind;
    try {
        kind = model_kind_from_string(m["kind"].get<std::string>());
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const int n = get_int(m, "n", 0);

    std::vector<Spike> spikes;
    if (m.contains("spikes")) {
        if (m["spikes"].is_string()) {
            spikes = parse_spikes(m["spikes"].get<std::string>());
        } else if (m["spikes"].is_array()) {
            for (const json& s : m["spikes"]) {
                require_keys(s, "model.spikes[]", {"value", "multiplicity"});
                spikes.push_back({get_num(s, "value", 0.0), get_int(s, "multiplicity", 1)});
            }
        } else {
            throw ConfigError("model.spikes: expected string or array");
        }
    }
    try {
        if (kind == ModelKind::C)
            return make_model_c(n, get_int(m, "m1", 0), get_int(m, "m2", 0), std::move(spikes));
        if (kind == ModelKind::B) return make_model_b(n, get_int(m, "m", 0), std::move(spikes));
        return make_model_a(n, get_int(m, "m", 0), std::move(spikes));
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

LinearStatistic statistic_from_config(const json& cfg) {
    if (!cfg.contains("statistic")) throw ConfigError("missing 'statistic' block");
    const json& s = cfg["statistic"];
    if (s.is_string()) return parse_statistic(s.get<std::string>());
    require_keys(s, "statistic", {"form", "t", "coeffs"});
    if (!s.contains("form") || !s["form"].is_string())
        throw ConfigError("statistic.form: required string");
    const std::string form = s["form"].get<std::string>();
    if (form == "exp") return LinearStatistic::exponential(get_num(s, "t", 1.0));
    if (form == "poly") {
        if (!s.contains("coeffs") || !s["coeffs"].is_array())
            throw ConfigError("statistic.coeffs: required array for poly");
        std::vector<double> c;
        for (const json& v : s["coeffs"]) c.push_back(v.get<double>());
        return LinearStatistic::poly(std::move(c));
    }
    return parse_statistic(form);
}

void validate_config(const json& cfg, const std::string& command) {
    require_keys(cfg, "config",
                 {"command", "model", "statistic", "numeric", "output", "tolerances", "hypgeom",
                  "density"});
    if (cfg.contains("command")) {
        if (!cfg["command"].is_string()) throw ConfigError("command: expected a string");
        if (!command.empty() && cfg["command"].get<std::string>() != command)
            throw ConfigError("config command '" + cfg["command"].get<std::string>() +
                              "' does not match invoked command '" + command + "'");
    }
    if (cfg.contains("numeric"))
        require_keys(cfg["numeric"], "numeric",
                     {"quad_n", "series_k", "contour_nodes", "trials", "seed", "workers"});
    if (cfg.contains("output"))
        require_keys(cfg["output"], "output", {"format", "path", "dump_samples"});
    if (cfg.contains("tolerances"))
        require_keys(cfg["tolerances"], "tolerances",
                     {"max_mean_z", "var_ratio_lo", "var_ratio_hi", "min_ks_pvalue"});
    if (cfg.contains("hypgeom"))
        require_keys(cfg["hypgeom"], "hypgeom", {"alpha", "a", "b", "x", "y", "contour"});
    if (cfg.contains("density"))
        require_keys(cfg["density"], "density", {"mode", "points_per_dim", "bins", "trials"});
    numeric_from_config(cfg);

    const std::string cmd = !command.empty()
                                ? command
                                : cfg.value("command", std::string());
    if (cmd == "clt" || cmd == "simulate") {
        (void)model_from_config(cfg);
        (void)statistic_from_config(cfg);
    } else if (cmd == "hypgeom") {
        if (!cfg.contains("hypgeom")) throw ConfigError("missing 'hypgeom' block");
    } else if (cmd == "density-check") {
        (void)model_from_config(cfg);
    } else if (cmd != "selftest") {
        throw ConfigError("unknown command '" + cmd + "'");
    }
    if (cfg.contains("output") && cfg["output"].contains("format")) {
        const std::string f = cfg["output"]["format"].get<std::string>();
        if (f != "json" && f != "csv") throw ConfigError("output.format: expected json or csv");
    }
}

std::string dump_json17(const json& doc) {
    std::ostringstream os;
    json17(doc, os, 0);
    os << "\n";
    return os.str();
}

std::string dump_csv17(const json& doc) {
    std::ostringstream os;
    os << "field,value\n";
    csv_rows(doc, "", os);
    return os.str();
}

json cmd_clt(const json& cfg) {
    const SpikedModel model = model_from_config(cfg);
    const LinearStatistic stat = statistic_from_config(cfg);
    const NumericOptions num = numeric_from_config(cfg);
    const CLTResult r = clt_params(model, stat, num.quad_n);
    json doc = clt_to_json(model, r);
    doc["command"] = "clt";
    doc["model"] = model_to_json(model);
    doc["statistic"] = stat.describe();
    json warnings = json::array();
    for (const auto& sc : r.spikes) {
        if (sc.saddle.near_critical) {
            std::ostringstream os;
            os << "near-critical spike " << sc.value << ": slow convergence";
            warnings.push_back(os.str());
        }
    }
    if (!warnings.empty()) doc["warnings"] = warnings;
    return doc;
}

json cmd_simulate(const json& cfg) {
    MCConfig mc;
    mc.model = model_from_config(cfg);
    mc.statistic = statistic_from_config(cfg);
    const NumericOptions num = numeric_from_config(cfg);
    mc.trials = num.trials;
    mc.seed = num.seed;
    mc.workers = num.workers;
    mc.quad_n = num.quad_n;
    const bool dump = cfg.contains("output") && cfg["output"].contains("dump_samples");
    mc.keep_samples = dump;

    const MCReport rep = run_mc(mc);

    const double max_z = cfg.contains("tolerances") ? get_num(cfg["tolerances"], "max_mean_z", 4.0) : 4.0;
    const double vr_lo =
        cfg.contains("tolerances") ? get_num(cfg["tolerances"], "var_ratio_lo", 0.85) : 0.85;
    const double vr_hi =
        cfg.contains("tolerances") ? get_num(cfg["tolerances"], "var_ratio_hi", 1.15) : 1.15;
    const double ks_min =
        cfg.contains("tolerances") ? get_num(cfg["tolerances"], "min_ks_pvalue", 0.01) : 0.01;

    const bool mean_ok = std::abs(rep.mean_z_score) < max_z;
    const bool var_ok = rep.var_ratio > vr_lo && rep.var_ratio < vr_hi;
    const bool ks_ok = rep.ks_pvalue > ks_min;

    json doc{{"command", "simulate"},
             {"model", model_to_json(mc.model)},
             {"statistic", mc.statistic.describe()},
             {"trials", rep.trials},
             {"seed", static_cast<std::uint64_t>(mc.seed)},
             {"workers", mc.workers},
             {"predicted", clt_to_json(mc.model, rep.prediction)},
             {"empirical",
              {{"mean", rep.empirical_mean},
               {"var", rep.empirical_var},
               {"mean_std_error", rep.mean_std_error},
               {"var_std_error", rep.var_std_error},
               {"variance_defined", rep.variance_defined}}},
             {"comparison",
              {{"mean_z_score", rep.mean_z_score},
               {"var_ratio", rep.var_ratio},
               {"ks_statistic", rep.ks_statistic},
               {"ks_pvalue", rep.ks_pvalue}}},
             {"tolerances",
              {{"max_mean_z", max_z},
               {"var_ratio_lo", vr_lo},
               {"var_ratio_hi", vr_hi},
               {"min_ks_pvalue", ks_min}}},
             {"checks",
              {{"mean_ok", mean_ok},
               {"var_ok", var_ok},
               {"ks_ok", ks_ok},
               {"pass", mean_ok && var_ok && ks_ok}}}};

    if (dump) {
        const std::string path = cfg["output"]["dump_samples"].get<std::string>();
        std::ofstream out(path);
        if (!out) throw NumericalError("cannot open sample dump path: " + path);
        for (double v : rep.samples) out << format_double(v) << "\n";
        doc["samples_dumped_to"] = path;
    }
    return doc;
}

json cmd_hypgeom(const json& cfg) {
    const json& h = cfg.at("hypgeom");
    HypgeomSpec spec;
    spec.alpha = get_num(h, "alpha", 1.0);
    if (h.contains("a"))
        for (const json& v : h["a"]) spec.a.push_back(v.get<double>());
    if (h.contains("b"))
        for (const json& v : h["b"]) spec.b.push_back(v.get<double>());
    if (!h.contains("x") || !h.contains("y")) throw ConfigError("hypgeom: x and y are required");
    std::vector<double> xs, ys;
    for (const json& v : h["x"]) xs.push_back(v.get<double>());
    for (const json& v : h["y"]) ys.push_back(v.get<double>());
    const int r = static_cast<int>(xs.size());
    const int n = static_cast<int>(ys.size());
    if (r < 1 || r > n) throw ConfigError("hypgeom: requires 1 <= len(x) <= len(y)");
    for (int i = 1; i < r; ++i)
        if (xs[i - 1] < xs[i]) throw ConfigError("hypgeom: x must be weakly decreasing");

    const bool all_zero = std::all_of(xs.begin(), xs.end(), [](double v) { return v == 0.0; });
    if (all_zero) {
        // X = 0: every representation trivially evaluates to one.
        return json{{"command", "hypgeom"}, {"x", h["x"]},        {"y", h["y"]},
                    {"series_value", 1.0},  {"det_value", 1.0},   {"contour_value", 1.0},
                    {"series_tail", 0.0},   {"rel_diff_series_det", 0.0},
                    {"rel_diff_series_contour", 0.0}};
    }
    if (std::any_of(xs.begin(), xs.end(), [](double v) { return v == 0.0; }))
        throw ConfigError("hypgeom: x values must be nonzero (zeros belong to the padding)");

    const NumericOptions num = numeric_from_config(cfg);

    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
    Eigen::VectorXd x_full = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < r; ++i) x_full[i] = xs[i];

    json doc{{"command", "hypgeom"},
             {"alpha", spec.alpha},
             {"a", h.contains("a") ? h["a"] : json::array()},
             {"b", h.contains("b") ? h["b"] : json::array()},
             {"x", h["x"]},
             {"y", h["y"]},
             {"series_k", num.series_k}};

    const auto series = mhg_series(spec, x_full, y, num.series_k);
    doc["series_value"] = series.value;
    doc["series_tail"] = series.tail;

    if (spec.alpha == 1.0) {
        // Collapse repeats into a multiplicity spectrum.
        MultSpectrum ms;
        std::vector<double> vals;
        std::vector<int> mults;
        for (int i = 0; i < r; ++i) {
            if (!vals.empty() && xs[i] == vals.back())
                mults.back()++;
            else {
                vals.push_back(xs[i]);
                mults.push_back(1);
            }
        }
        ms.values = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
        ms.mults = mults;
        const bool has_mult = ms.blocks() != r;
        const double det =
            has_mult ? mhg_det_mult(spec, ms, y, num.series_k)
                     : mhg_det_distinct(spec, Eigen::Map<Eigen::VectorXd>(xs.data(), r), y,
                                        num.series_k);
        doc["det_value"] = det;
        doc["det_path"] = has_mult ? "multiplicity" : "distinct";
        doc["rel_diff_series_det"] = std::abs(det - series.value) / std::max(1e-300, std::abs(series.value));
    }

    if (h.value("contour", false)) {
        const double lo = y.minCoeff(), hi = y.maxCoeff();
        ContourSpec contour({0.5 * (lo + hi), 0.0}, (hi - lo) * 1.25 + 0.75, num.contour_nodes);
        const double cv = mhg_contour(spec, Eigen::Map<Eigen::VectorXd>(xs.data(), r), n, y, contour,
                                     num.series_k);
        doc["contour_value"] = cv;
        doc["rel_diff_series_contour"] =
            std::abs(cv - series.value) / std::max(1e-300, std::abs(series.value));
    }
    return doc;
}

json cmd_density_check(const json& cfg) {
    const SpikedModel model = model_from_config(cfg);
    const json d = cfg.contains("density") ? cfg["density"] : json::object();
    const std::string mode = d.value("mode", std::string("normalization"));
    const NumericOptions num = numeric_from_config(cfg);

    json doc{{"command", "density-check"}, {"model", model_to_json(model)}, {"mode", mode}};

    if (mode == "normalization" || mode == "both") {
        if (model.n > 6) throw ConfigError("density normalization: requires n <= 6");
        const int pts = get_int(d, "points_per_dim", model.n <= 2 ? 64 : 24);
        const double integral = density_normalization(model, pts);
        doc["normalization"] = {{"integral", integral},
                                {"abs_error", std::abs(integral - 1.0)},
                                {"points_per_dim", pts}};
    }
    if (mode == "histogram" || mode == "both") {
        if (model.n > 3) throw ConfigError("density histogram: requires n <= 3");
        const int pts = get_int(d, "points_per_dim", 64);
        const int bins = get_int(d, "bins", 24);
        const int trials = get_int(d, "trials", 4000);

        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(trials) * model.n);
        for (int t = 0; t < trials; ++t) {
            Rng rng(num.seed, static_cast<std::uint64_t>(t));
            Eigen::VectorXd eigs = sample_model(model, rng);
            for (int i = 0; i < model.n; ++i) {
                const double v = model.kind == ModelKind::C ? eigs[i] / (1.0 + eigs[i]) : eigs[i];
                values.push_back(v);
            }
        }
        const double lo = *std::min_element(values.begin(), values.end());
        const double hi = *std::max_element(values.begin(), values.end());
        const double width = (hi - lo) / bins;
        std::vector<int> counts(bins, 0);
        for (double v : values) {
            int b = static_cast<int>((v - lo) / width);
            counts[std::clamp(b, 0, bins - 1)]++;
        }

        json rows = json::array();
        double sup_diff = 0.0;
        std::vector<double> gx, gw;
        gauss_legendre01(16, gx, gw);
        for (int b = 0; b < bins; ++b) {
            const double blo = lo + b * width, bhi = blo + width;
            const double mc = static_cast<double>(counts[b]) / values.size();
            double pred = 0.0;
            for (std::size_t q = 0; q < gx.size(); ++q)
                pred += gw[q] * density_marginal(model, blo + gx[q] * width, pts);
            pred *= width;
            sup_diff = std::max(sup_diff, std::abs(pred - mc));
            rows.push_back({{"lo", blo}, {"hi", bhi}, {"mc_mass", mc}, {"predicted_mass", pred}});
        }
        doc["histogram"] = {{"bins", rows}, {"sup_diff", sup_diff}, {"trials", trials}};
    }
    if (mode != "normalization" && mode != "histogram" && mode != "both")
        throw ConfigError("density.mode: expected normalization|histogram|both");
    return doc;
}

json cmd_selftest() {
    const auto checks = run_selftests();
    json rows = json::array();
    bool all = true;
    for (const auto& c : checks) {
        rows.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        all = all && c.pass;
    }
    return json{{"command", "selftest"}, {"checks", rows}, {"pass", all}};
}

namespace {

std::vector<SelfCheck> run_selftests() {
    std::vector<SelfCheck> out;
    auto check = [&](const std::string& name, bool pass, double got, double want) {
        std::ostringstream os;
        os << "got " << got << ", want " << want;
        out.push_back({name, pass, os.str()});
    };
    const double pi = std::numbers::pi;

    {
        const double v = gc1_integrate([](double) { return 1.0; }, 0.0, 4.0, 64);
        check("numerics/gc1-arcsine-mass", std::abs(v - pi) < 1e-12, v, pi);
    }
    {
        const double v = gc2_integrate([](double) { return 1.0; }, 0.0, 4.0, 64);
        check("numerics/gc2-semicircle-mass", std::abs(v - 2.0 * pi) < 1e-12, v, 2.0 * pi);
    }
    {
        ChebSeries one = cheb_fit([](double) { return 1.0; }, -1.0, 1.0, 8);
        const double v = pv_hilbert(one, 0.0);
        check("numerics/pv-odd-symmetry", std::abs(v) < 1e-12, v, 0.0);
    }
    {
        const auto v = contour_trapezoid([](std::complex<double> z) { return 1.0 / z; },
                                         ContourSpec({0, 0}, 1.0, 64));
        check("numerics/contour-simple-pole", std::abs(v - 1.0) < 1e-12, v.real(), 1.0);
    }
    {
        Eigen::VectorXd x(3);
        x << 0.31, -0.12, 0.57;
        bool ok = true;
        double worst = 0.0;
        for (double alpha : {0.5, 1.0, 2.0}) {
            double sum = 0.0;
            for (const auto& kappa : partitions_of(4, 3)) sum += jack_c(kappa, x, alpha);
            const double want = std::pow(x.sum(), 4);
            worst = std::max(worst, std::abs(sum - want) / std::abs(want));
            ok = ok && worst < 1e-10;
        }
        check("jack/degree-sum-identity", ok, worst, 0.0);
    }
    {
        Eigen::VectorXd x(3), ones(3);
        x << 0.4, -0.3, 0.9;
        ones << 1, 1, 1;
        const auto v = mhg_series(HypgeomSpec{}, x, ones, 40);
        const double want = std::exp(x.sum());
        check("jack/etr-reduction", std::abs(v.value - want) < 1e-8 * want, v.value, want);
    }
    {
        HypgeomSpec s;
        s.a = {1.7};
        s.b = {2.9};
        Eigen::VectorXd x(1), y(1);
        x << 0.6;
        y << 0.8;
        const auto v = mhg_series(s, x, y, 40);
        const double want = scalar_pfq(s, 0.48, 40).real();
        check("jack/scalar-reduction", std::abs(v.value - want) < 1e-12, v.value, want);
    }
    {
        HypgeomSpec s;
        Eigen::VectorXd xr(2), y(4);
        xr << 0.64, 0.31;
        y << 0.15, 0.38, 0.61, 0.83;
        Eigen::VectorXd xfull = Eigen::VectorXd::Zero(4);
        xfull.head(2) = xr;
        const double det = mhg_det_distinct(s, xr, y, 40);
        const double ser = mhg_series(s, xfull, y, 40).value;
        check("hypmatrix/det-vs-series", std::abs(det - ser) < 1e-7 * std::abs(ser), det, ser);
    }
    {
        HypgeomSpec s;
        Eigen::VectorXd y(4);
        y << 0.15, 0.38, 0.61, 0.83;
        MultSpectrum ms;
        ms.values = Eigen::VectorXd::Constant(1, 0.52);
        ms.mults = {2};
        Eigen::VectorXd xfull = Eigen::VectorXd::Zero(4);
        xfull[0] = xfull[1] = 0.52;
        const double det = mhg_det_mult(s, ms, y, 40);
        const double ser = mhg_series(s, xfull, y, 40).value;
        check("hypmatrix/mult-vs-series", std::abs(det - ser) < 1e-7 * std::abs(ser), det, ser);
    }
    {
        HypgeomSpec s;
        Eigen::VectorXd xr(1), y(3);
        xr << 0.7;
        y << 0.2, 0.5, 0.9;
        const double det = mhg_det_distinct(s, xr, y, 40);
        const double lem = mhg_contour(s, xr, 3, y, ContourSpec({0.55, 0.0}, 0.8, 256), 40);
        check("hypmatrix/contour-vs-det", std::abs(lem - det) < 1e-8 * std::abs(det), lem, det);
    }
    {
        const SpikedModel mod = make_model_a(100, 200, {{3.0, 1}});
        const CLTResult r = clt_params(mod, LinearStatistic::power(1));
        const bool ok = std::abs(r.mu - 2.0) < 1e-9 && std::abs(r.sigma2 - 2.0) < 1e-8 &&
                        std::abs(r.spikes[0].mu_bar - 6.0) < 1e-8;
        check("clt/model-a-closed-forms", ok, r.spikes[0].mu_bar, 6.0);
    }
    {
        const SpikedModel mod = make_model_b(100, 200, {{2.5, 1}});
        const CLTResult r = clt_params(mod, LinearStatistic::power(1));
        check("clt/model-b-mu-bar", std::abs(r.spikes[0].mu_bar - 2.5) < 1e-8, r.spikes[0].mu_bar,
              2.5);
    }
    {
        const SpikedModel mod = make_model_c(100, 200, 200, {{2.0, 1}});
        const CLTResult r = clt_params(mod, LinearStatistic::power(1));
        check("clt/model-c-mu-bar", std::abs(r.spikes[0].mu_bar - 2.0) < 1e-7, r.spikes[0].mu_bar,
              2.0);
    }
    {
        const SpikedModel mod = make_model_a(50, 100, {{1.0, 1}});
        const LinearStatistic f = LinearStatistic::poly({0.3, -1.2, 0.8, 0.05});
        const double direct = var_sigma2(f, mod);
        const double ident = var_sigma2_cheb(f, mod);
        check("clt/sigma2-two-routes", std::abs(direct - ident) < 1e-9 * std::max(1.0, std::abs(direct)),
              direct, ident);
    }
    {
        const SpikedModel mod = make_model_a(2, 3, {{1.0, 1}});
        const double integral = density_normalization(mod, 48);
        check("density/normalization-n2", std::abs(integral - 1.0) < 5e-3, integral, 1.0);
    }
    {
        Rng r1(42, 7), r2(42, 7);
        const SpikedModel mod = make_model_a(20, 30, {{2.0, 1}});
        const double a = lss(sample_model(mod, r1), LinearStatistic::log(), mod.kind);
        const double b = lss(sample_model(mod, r2), LinearStatistic::log(), mod.kind);
        check("ensemble/determinism", a == b, a, b);
    }
    {
        const SpikedModel mod = make_model_a(30, 60, {{2.0, 2}});
        double mean = 0.0;
        const int trials = 400;
        for (int t = 0; t < trials; ++t) {
            Rng rng(5, static_cast<std::uint64_t>(t));
            mean += sample_model(mod, rng).sum();
        }
        mean /= trials;
        const double want = mod.m * (mod.n + 2 * 2.0);
        // 3 sigma with Var(tr W) ~ m * n * E|sigma|^2-ish; generous band
        check("ensemble/trace-moment", std::abs(mean - want) < 0.05 * want, mean, want);
    }
    return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    auto fail_config = [&](const std::string& msg) {
        json e{{"error", {{"type", "config"}, {"message", msg}}}};
        err << dump_json17(e);
        return 2;
    };
    auto fail_numeric = [&](const std::string& msg) {
        json e{{"error", {{"type", "numerical"}, {"message", msg}}}};
        err << dump_json17(e);
        return 3;
    };

    CLI::App app{"contour, determinant, and Monte Carlo tools for multi-spiked ensembles",
                 "spiked"};
    app.require_subcommand(0, 1);

    std::string config_path, model_kind, spikes, stat, dump_path, format = "json", out_path;
    long long n = -1, m = -1, m1 = -1, m2 = -1, trials = -1, workers = -1, quad_n = -1,
              series_k = -1, seed = 0;
    bool have_seed = false;

    std::vector<CLI::App*> subs;
    for (const char* name : {"clt", "simulate", "hypgeom", "density-check", "selftest"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON configuration; flags override fields");
        sub->add_option("--model", model_kind, "model kind A|B|C");
        sub->add_option("--n", n, "matrix dimension");
        sub->add_option("--m", m, "degrees of freedom (models A/B)");
        sub->add_option("--m1", m1, "numerator degrees of freedom (model C)");
        sub->add_option("--m2", m2, "denominator degrees of freedom (model C)");
        sub->add_option("--spikes", spikes, "spike list value:multiplicity[,...]");
        sub->add_option("--stat", stat, "statistic x|x2|log|exp:t|poly:c0,c1,...");
        sub->add_option("--trials", trials, "Monte Carlo trials");
        sub->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
            have_seed = true;
        });
        sub->add_option("--workers", workers, "worker threads for trials");
        sub->add_option("--quad-n", quad_n, "quadrature nodes");
        sub->add_option("--series-k", series_k, "series truncation degree");
        sub->add_option("--format", format, "output format json|csv");
        sub->add_option("--out", out_path, "write the document here instead of stdout");
        sub->add_option("--dump-samples", dump_path, "write raw LSS samples, one per line");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }
    if (app.get_subcommands().empty()) {
        err << app.help();
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    json cfg = json::object();
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config file: " + config_path);
            try {
                in >> cfg;
            } catch (const std::exception& e) {
                throw ConfigError(std::string("config parse error: ") + e.what());
            }
        }
        if (!model_kind.empty()) cfg["model"]["kind"] = model_kind;
        if (n >= 0) cfg["model"]["n"] = n;
        if (m >= 0) cfg["model"]["m"] = m;
        if (m1 >= 0) cfg["model"]["m1"] = m1;
        if (m2 >= 0) cfg["model"]["m2"] = m2;
        if (!spikes.empty()) cfg["model"]["spikes"] = spikes;
        if (!stat.empty()) cfg["statistic"] = stat;
        if (trials >= 0) cfg["numeric"]["trials"] = trials;
        if (have_seed) cfg["numeric"]["seed"] = seed;
        if (workers >= 0) cfg["numeric"]["workers"] = workers;
        if (quad_n >= 0) cfg["numeric"]["quad_n"] = quad_n;
        if (series_k >= 0) cfg["numeric"]["series_k"] = series_k;
        if (!dump_path.empty()) cfg["output"]["dump_samples"] = dump_path;
        if (cfg.contains("output")) {
            if (cfg["output"].contains("format") && format == "json")
                format = cfg["output"]["format"].get<std::string>();
            if (cfg["output"].contains("path") && out_path.empty())
                out_path = cfg["output"]["path"].get<std::string>();
        }
        cfg["output"]["format"] = format;
        if (!out_path.empty()) cfg["output"]["path"] = out_path;

        validate_config(cfg, command);
    } catch (const ConfigError& e) {
        return fail_config(e.what());
    } catch (const std::exception& e) {
        return fail_config(e.what());
    }

    json doc;
    try {
        if (command == "clt") doc = cmd_clt(cfg);
        else if (command == "simulate") doc = cmd_simulate(cfg);
        else if (command == "hypgeom") doc = cmd_hypgeom(cfg);
        else if (command == "density-check") doc = cmd_density_check(cfg);
        else doc = cmd_selftest();
    } catch (const ConfigError& e) {
        return fail_config(e.what());
    } catch (const std::exception& e) {
        return fail_numeric(e.what());
    }

    const std::string text = format == "csv" ? dump_csv17(doc) : dump_json17(doc);
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) return fail_numeric("cannot open output path: " + out_path);
        f << text;
    } else {
        out << text;
    }

    if (command == "selftest" && !doc["pass"].get<bool>()) return 1;
    return 0;
}

}  // namespace spiked::cli
