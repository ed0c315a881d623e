#include "r2ch/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "r2ch/csv.hpp"

namespace r2ch {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_number(const std::string& key, int line, const std::string& text) {
    try {
        size_t pos = 0;
        const double x = std::stod(text, &pos);
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(x)) throw std::invalid_argument("not finite");
        return x;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": key '" + key +
                             "' needs a number, got '" + text + "'",
                         key, line);
    }
}

int parse_int(const std::string& key, int line, const std::string& text) {
    const double x = parse_number(key, line, text);
    const double r = std::round(x);
    if (std::abs(x - r) > 0.0 || std::abs(r) > 2e9)
        throw ParseError("line " + std::to_string(line) + ": key '" + key + "' needs an integer",
                         key, line);
    return static_cast<int>(r);
}

bool parse_bool(const std::string& key, int line, const std::string& text) {
    const std::string v = lower(text);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ParseError("line " + std::to_string(line) + ": key '" + key + "' needs true/false", key,
                     line);
}

std::vector<double> parse_list(const std::string& key, int line, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string it = trim(item);
        if (it.empty())
            throw ParseError("line " + std::to_string(line) + ": key '" + key +
                                 "' has an empty list entry",
                             key, line);
        out.push_back(parse_number(key, line, it));
    }
    return out;
}

[[noreturn]] void fail_constraint(const std::string& key, int line, const std::string& why) {
    throw ParseError("line " + std::to_string(line) + ": key '" + key + "': " + why, key, line);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, int> seen;  // key -> line, for duplicate and pairing diagnostics

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const size_t hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string body = trim(raw);
        if (body.empty()) continue;

        const size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line) + ": expected 'key = value', got '" +
                                 body + "'",
                             "", line);
        const std::string key = lower(trim(body.substr(0, eq)));
        const std::string val = trim(body.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(line) + ": missing key before '='", "", line);
        if (val.empty())
            throw ParseError("line " + std::to_string(line) + ": key '" + key + "' has no value",
                             key, line);
        if (seen.count(key))
            throw ParseError("line " + std::to_string(line) + ": key '" + key +
                                 "' already set on line " + std::to_string(seen[key]),
                             key, line);
        seen[key] = line;

        if (key == "case") {
            cfg.case_name = val;
            if (val != "custom" && !find_case(val))
                fail_constraint(key, line, "unknown case '" + val + "'");
        } else if (key == "init") {
            if (val != "dam_break" && val != "peakon_pair")
                fail_constraint(key, line, "expected dam_break or peakon_pair");
            cfg.init = val;
        } else if (key == "a") {
            cfg.a = parse_number(key, line, val);
        } else if (key == "x_left") {
            cfg.x_left = parse_number(key, line, val);
        } else if (key == "l") {
            cfg.L = parse_number(key, line, val);
            if (!(*cfg.L > 0.0)) fail_constraint(key, line, "period length must be positive");
        } else if (key == "m") {
            cfg.M = parse_int(key, line, val);
            if (*cfg.M < 4) fail_constraint(key, line, "need at least 4 nodes");
        } else if (key == "h") {
            cfg.h = parse_number(key, line, val);
            if (!(*cfg.h > 0.0)) fail_constraint(key, line, "spacing must be positive");
        } else if (key == "n") {
            cfg.N = parse_int(key, line, val);
            if (*cfg.N < 1) fail_constraint(key, line, "need at least one step");
        } else if (key == "tau") {
            cfg.tau = parse_number(key, line, val);
            if (!(*cfg.tau > 0.0)) fail_constraint(key, line, "time step must be positive");
        } else if (key == "t") {
            cfg.T = parse_number(key, line, val);
            if (!(*cfg.T > 0.0)) fail_constraint(key, line, "horizon must be positive");
        } else if (key == "kappa") {
            cfg.kappa = parse_number(key, line, val);
        } else if (key == "sigma") {
            cfg.sigma = parse_number(key, line, val);
            if (!(*cfg.sigma > 0.0)) fail_constraint(key, line, "sigma must be positive");
        } else if (key == "mu") {
            cfg.mu = parse_number(key, line, val);
        } else if (key == "omega") {
            cfg.omega = parse_number(key, line, val);
            if (!(*cfg.omega >= 0.0 && *cfg.omega < 0.25))
                fail_constraint(key, line, "omega must lie in [0, 1/4)");
        } else if (key == "tol") {
            cfg.tol = parse_number(key, line, val);
            if (!(*cfg.tol > 0.0)) fail_constraint(key, line, "tolerance must be positive");
        } else if (key == "max_iter") {
            cfg.max_iter = parse_int(key, line, val);
            if (*cfg.max_iter < 1) fail_constraint(key, line, "need at least one iteration");
        } else if (key == "snapshot_times") {
            cfg.snapshot_times = parse_list(key, line, val);
            for (double t : cfg.snapshot_times)
                if (t < 0.0) fail_constraint(key, line, "snapshot times must be nonnegative");
        } else if (key == "out_dir") {
            cfg.out_dir = val;
        } else if (key == "emit_fields") {
            cfg.emit_fields = parse_bool(key, line, val);
        } else {
            throw ParseError("line " + std::to_string(line) + ": unknown key '" + key + "'", key,
                             line);
        }
    }

    if (cfg.M && cfg.h)
        throw ParseError("give exactly one of M or h (M on line " + std::to_string(seen["m"]) +
                             ", h on line " + std::to_string(seen["h"]) + ")",
                         "h", seen["h"]);
    if (cfg.N && cfg.tau)
        throw ParseError("give exactly one of N or tau (N on line " + std::to_string(seen["n"]) +
                             ", tau on line " + std::to_string(seen["tau"]) + ")",
                         "tau", seen["tau"]);

    if (cfg.case_name.empty())
        throw ParseError("missing mandatory key: case (a preset name or 'custom')", "case", 0);
    if (cfg.case_name == "custom") {
        std::vector<std::string> missing;
        if (!cfg.init) missing.push_back("init");
        if (!cfg.x_left) missing.push_back("x_left");
        if (!cfg.L) missing.push_back("L");
        if (!cfg.T) missing.push_back("T");
        if (!cfg.M && !cfg.h) missing.push_back("M or h");
        if (!cfg.N && !cfg.tau) missing.push_back("N or tau");
        if (cfg.init && *cfg.init == "dam_break" && !cfg.a) missing.push_back("a");
        if (!missing.empty()) {
            std::string msg = "custom case is missing mandatory keys:";
            for (const std::string& k : missing) msg += " " + k + ",";
            msg.pop_back();
            throw ParseError(msg, missing.front(), 0);
        }
    }
    return cfg;
}

std::string emit_config(const RunConfig& cfg) {
    std::string out;
    auto put = [&out](const char* key, const std::string& val) {
        out += key;
        out += " = ";
        out += val;
        out += "\n";
    };
    put("case", cfg.case_name);
    if (cfg.init) put("init", *cfg.init);
    if (cfg.a) put("a", format_double(*cfg.a));
    if (cfg.x_left) put("x_left", format_double(*cfg.x_left));
    if (cfg.L) put("L", format_double(*cfg.L));
    if (cfg.M) put("M", std::to_string(*cfg.M));
    if (cfg.h) put("h", format_double(*cfg.h));
    if (cfg.N) put("N", std::to_string(*cfg.N));
    if (cfg.tau) put("tau", format_double(*cfg.tau));
    if (cfg.T) put("T", format_double(*cfg.T));
    if (cfg.kappa) put("kappa", format_double(*cfg.kappa));
    if (cfg.sigma) put("sigma", format_double(*cfg.sigma));
    if (cfg.mu) put("mu", format_double(*cfg.mu));
    if (cfg.omega) put("omega", format_double(*cfg.omega));
    if (cfg.tol) put("tol", format_double(*cfg.tol));
    if (cfg.max_iter) put("max_iter", std::to_string(*cfg.max_iter));
    if (!cfg.snapshot_times.empty()) {
        std::string list;
        for (double t : cfg.snapshot_times) {
            if (!list.empty()) list += ", ";
            list += format_double(t);
        }
        put("snapshot_times", list);
    }
    if (cfg.out_dir != ".") put("out_dir", cfg.out_dir);
    if (cfg.emit_fields) put("emit_fields", "true");
    return out;
}

ResolvedRun resolve(const RunConfig& cfg) {
    const CasePreset* preset = cfg.case_name == "custom" ? nullptr : find_case(cfg.case_name);
    if (!preset && cfg.case_name != "custom")
        throw ParseError("unknown case '" + cfg.case_name + "'", "case", 0);

    ResolvedRun rr;
    rr.case_name = cfg.case_name;
    rr.out_dir = cfg.out_dir;
    rr.emit_fields = cfg.emit_fields;

    if (!preset && (!cfg.L || !cfg.T || (!cfg.M && !cfg.h) || (!cfg.N && !cfg.tau) || !cfg.init))
        throw ParseError("custom case needs init, x_left, L, T, one of M/h and one of N/tau",
                         "case", 0);

    const double x_left = cfg.x_left.value_or(preset ? preset->x_left : 0.0);
    const double L = cfg.L.value_or(preset ? preset->L : 0.0);
    const double T = cfg.T.value_or(preset ? preset->T : 0.0);

    if (cfg.M)
        rr.grid = GridSpec::with_count(x_left, L, *cfg.M);
    else
        rr.grid = GridSpec::with_spacing(x_left, L, cfg.h ? *cfg.h : preset->default_h);
    if (cfg.N)
        rr.time = TimeGrid::with_steps(T, *cfg.N);
    else
        rr.time = TimeGrid::with_tau(T, cfg.tau ? *cfg.tau : preset->default_tau);

    try {
        rr.params = PhysParams(cfg.kappa.value_or(preset ? preset->params.kappa : 0.0),
                               cfg.sigma.value_or(preset ? preset->params.sigma : 1.0),
                               cfg.mu.value_or(preset ? preset->params.mu : 0.0),
                               cfg.omega.value_or(preset ? preset->params.omega : 0.0));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid physical parameters: ") + e.what(), "omega", 0);
    }

    if (cfg.tol) rr.solver.picard_tol = *cfg.tol;
    if (cfg.max_iter) rr.solver.max_picard_iters = *cfg.max_iter;

    rr.snapshot_times = cfg.snapshot_times.empty() && preset ? preset->snapshot_times
                                                             : cfg.snapshot_times;
    for (double t : rr.snapshot_times)
        if (t < 0.0 || t > T * (1.0 + 1e-12))
            throw ParseError("snapshot time " + format_double(t) + " lies outside [0, T]",
                             "snapshot_times", 0);

    const std::string init_tag =
        cfg.init.value_or(preset && preset->init == InitKind::peakon_pair ? "peakon_pair"
                                                                          : "dam_break");
    rr.init_kind = init_tag == "dam_break" ? InitKind::dam_break : InitKind::peakon_pair;
    rr.init_a = cfg.a.value_or(preset ? preset->a : 0.0);
    if (rr.init_kind == InitKind::dam_break)
        rr.init = init_dam_break(rr.init_a, rr.grid);
    else
        rr.init = init_peakon_antipeakon(rr.grid);
    return rr;
}

}  // namespace r2ch
