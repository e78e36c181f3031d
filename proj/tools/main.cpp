#include "commands.hpp"

#include "cqed/errors.hpp"
#include "cqed/validation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#ifndef CQED_VERSION
#define CQED_VERSION "0.0.0"
#endif

namespace {

using namespace cqed::cli;
using nlohmann::json;

constexpr int exit_validation = 2;
constexpr int exit_numeric = 3;
constexpr int exit_input = 4;

struct RunArgs {
    std::string figure;
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    // Shorthand flags for the system parameters.
    std::vector<std::pair<std::string, std::string>> params;
};

void apply(Settings& s, const RunArgs& a) {
    if (!a.config.empty()) s.load_ini(a.config);
    for (const auto& [k, v] : a.params) s.set("params." + k, v);
    for (const std::string& kv : a.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw cqed::InvalidArgument("--set expects key=value, got '" + kv + "'");
        s.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!a.out.empty()) s.set("output.dir", a.out);
}

int execute(const std::string& command, const std::string& figure, const Settings& s) {
    Output out(s.str("output.dir"));
    run_command(command, figure, s, out);
    json manifest = {{"tool", "cqed"},
                     {"version", CQED_VERSION},
                     {"command", command},
                     {"figure", figure},
                     {"settings", s.to_json()},
                     {"outputs", out.files()}};
    out.json("manifest.json", manifest);
    std::cout << "wrote " << out.files().size() << " files to " << out.dir().string() << '\n';
    return 0;
}

int rerun(const std::string& path, const std::string& out_dir) {
    std::ifstream f(path);
    if (!f) throw cqed::InvalidArgument("cannot open manifest " + path);
    json m;
    try {
        f >> m;
    } catch (const json::exception& e) {
        throw cqed::InvalidArgument("manifest " + path + ": " + e.what());
    }
    for (const char* k : {"tool", "command", "figure", "settings"})
        if (!m.contains(k)) throw cqed::InvalidArgument(std::string("manifest lacks '") + k + "'");
    if (m["tool"] != "cqed") throw cqed::InvalidArgument("manifest was not written by cqed");
    const std::string command = m["command"].get<std::string>();
    const std::string figure = m["figure"].get<std::string>();
    if (m.value("version", "") != CQED_VERSION)
        std::cerr << "warning: manifest version " << m.value("version", "?") << " differs from " << CQED_VERSION << '\n';
    Settings s = defaults_for(command, figure);
    s.load_json(m["settings"]);
    if (!out_dir.empty()) s.set("output.dir", out_dir);
    return execute(command, figure, s);
}

int validate(bool fast, bool inject) {
    cqed::ValidationOptions opts;
    if (inject) opts.tolerance_scale = 0.0;
    int failed = 0, run = 0;
    for (const cqed::Check& c : cqed::oracle_checks()) {
        if (fast && !c.fast) continue;
        const cqed::CheckResult r = cqed::run_check(c, opts);
        ++run;
        failed += r.passed ? 0 : 1;
        std::printf("%-4s %s  %s (%.1f s)\n       %s\n", r.id.c_str(), r.passed ? "PASS" : "FAIL", r.title.c_str(),
                    r.seconds, r.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d checks failed\n", failed, run);
    return failed == 0 ? 0 : exit_validation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cascaded cavity QED: spectra, correlations, mean field and quantum trajectories"};
    app.set_version_flag("--version", CQED_VERSION);
    app.require_subcommand(1);

    RunArgs args;
    std::string current;
    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("-c,--config", args.config, "INI file with one [section] per module")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", args.sets, "override a setting, section.key=value (repeatable)");
        sub->add_option("-o,--out", args.out, "output directory");
        for (const char* p : {"g", "kappa", "gamma", "gamma_s", "eps_d", "focusing", "eta", "theta"}) {
            sub->add_option_function<std::string>(std::string("--") + p,
                                                  [&args, p](const std::string& v) { args.params.emplace_back(p, v); },
                                                  std::string("params.") + p);
        }
    };

    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name, name == "figure" ? "reproduce one figure" : "run " + name);
        if (name == "figure")
            sub->add_option("name", args.figure, "fig2 ... fig8")->required()->check(CLI::IsMember(figures));
        add_run_options(sub);
        sub->callback([&current, name] { current = name; });
    }

    bool fast = false, inject = false;
    CLI::App* val = app.add_subcommand("validate", "run the oracle suite");
    val->add_flag("--fast", fast, "only the quick checks");
    val->add_flag("--inject-failure", inject, "zero every tolerance so that all checks fail");

    std::string manifest, rerun_out;
    CLI::App* re = app.add_subcommand("rerun", "repeat a run from its manifest.json");
    re->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
    re->add_option("-o,--out", rerun_out, "output directory (default: the manifest's)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_input;
    }

    try {
        if (val->parsed()) return validate(fast, inject);
        if (re->parsed()) return rerun(manifest, rerun_out);
        Settings s = defaults_for(current, args.figure);
        apply(s, args);
        return execute(current, args.figure, s);
    } catch (const cqed::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_input_error() ? exit_input : exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}
