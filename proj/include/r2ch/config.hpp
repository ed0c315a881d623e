#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "r2ch/experiments.hpp"

namespace r2ch {

// Configuration text rejected; `key` names the offending key ("" when the
// problem is not tied to one key) and `line` its 1-based line (0 when global).
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::string key_, int line_)
        : std::runtime_error(what), key(std::move(key_)), line(line_) {}
    std::string key;
    int line;
};

// One run request as written by the user: a preset name (or "custom") plus
// individual overrides. Unset optionals defer to the preset.
struct RunConfig {
    std::string case_name;
    std::optional<std::string> init;  // "dam_break" or "peakon_pair"
    std::optional<double> a;
    std::optional<double> x_left;
    std::optional<double> L;
    std::optional<int> M;
    std::optional<double> h;
    std::optional<int> N;
    std::optional<double> tau;
    std::optional<double> T;
    std::optional<double> kappa;
    std::optional<double> sigma;
    std::optional<double> mu;
    std::optional<double> omega;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::vector<double> snapshot_times;
    std::string out_dir = ".";
    bool emit_fields = false;

    bool operator==(const RunConfig&) const = default;
};

// Line-oriented `key = value` text; `#` opens a comment; keys are matched
// case-insensitively; lists are comma-separated. Unknown keys, duplicate keys,
// missing mandatory keys, and constraint violations all throw ParseError.
RunConfig parse_config(const std::string& text);

// Inverse of parse_config: parse_config(emit_config(cfg)) == cfg.
std::string emit_config(const RunConfig& cfg);

// A config merged with its preset and validated, ready to run.
struct ResolvedRun {
    std::string case_name;
    InitKind init_kind = InitKind::dam_break;
    double init_a = 0.0;  // dam-break width (ignored for the peakon pair)
    GridSpec grid;
    TimeGrid time;
    PhysParams params;
    SolverCfg solver;
    State init;
    std::vector<double> snapshot_times;
    std::string out_dir;
    bool emit_fields = false;
};

ResolvedRun resolve(const RunConfig& cfg);

}  // namespace r2ch
