// Command-line driver: `run`, `invariants`, `converge`, and `selftest`
// subcommands over the shallow-water core. Verbosity is controlled by the
// R2CH_LOG environment variable (silent/error/warn/info/debug).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "r2ch/commands.hpp"
#include "r2ch/log.hpp"

namespace {

// Build the effective RunConfig from --config and/or --case. Returns false
// (after logging) when neither source yields a case.
bool load_config(const std::string& config_path, const std::string& case_name,
                 const std::string& out_dir, r2ch::RunConfig& cfg) {
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            r2ch::log::error("cannot read config file '" + config_path + "'");
            return false;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = r2ch::parse_config(ss.str());
    }
    if (!case_name.empty()) cfg.case_name = case_name;
    if (cfg.case_name.empty()) {
        r2ch::log::error("no case selected; pass --case <name> or --config <file>");
        return false;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure-preserving solver for rotating two-component shallow-water waves"};
    app.require_subcommand(1);

    std::string config_path, case_name, out_dir;
    std::string axis = "space";
    int levels = 5;
    int jobs = 1;
    bool gnuplot = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--case", case_name, "preset name (overrides the config's case)");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_flag("--gnuplot-script", gnuplot, "also write a plotting script beside the CSVs");
    };

    CLI::App* sub_run =
        app.add_subcommand("run", "march a case; write invariants.csv and snapshot CSVs");
    add_common(sub_run);
    CLI::App* sub_inv =
        app.add_subcommand("invariants", "march a case; write invariants.csv only");
    add_common(sub_inv);
    CLI::App* sub_conv = app.add_subcommand("converge", "refinement study along one axis");
    add_common(sub_conv);
    sub_conv->add_option("--axis", axis, "refinement axis")
        ->check(CLI::IsMember({"space", "time"}));
    sub_conv->add_option("--levels", levels, "number of table rows (>= 2)")
        ->check(CLI::Range(2, 16));
    sub_conv->add_option("--jobs", jobs, "worker threads for the level runs")
        ->check(CLI::Range(1, 256));
    app.add_subcommand("selftest", "randomized check of the discrete operator identities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? r2ch::kExitOk : r2ch::kExitUsage;
    }

    if (app.got_subcommand("selftest")) return r2ch::cmd_selftest(std::cout);

    r2ch::RunConfig cfg;
    try {
        if (!load_config(config_path, case_name, out_dir, cfg)) return r2ch::kExitUsage;
    } catch (const r2ch::ParseError& e) {
        r2ch::log::error(e.what());
        return r2ch::kExitUsage;
    }

    if (app.got_subcommand(sub_run)) return r2ch::cmd_run(cfg, false, gnuplot);
    if (app.got_subcommand(sub_inv)) return r2ch::cmd_run(cfg, true, gnuplot);
    const r2ch::Axis ax = axis == "space" ? r2ch::Axis::space : r2ch::Axis::time;
    return r2ch::cmd_converge(cfg, ax, levels, jobs, gnuplot);
}
