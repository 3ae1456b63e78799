// Command-line front end: branch, audit, levels, extremal, verify.
// Exit codes: 0 success, 1 runtime failure (or failed audit/criteria),
// 2 invalid configuration or usage.
#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include "CLI11.hpp"

#include "gelfand/commands.hpp"
#include "gelfand/common.hpp"
#include "gelfand/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Minimal branches of -laplace u = lambda g(u), with level-set audits"};
    app.require_subcommand(1);
    app.set_version_flag("--version", gelfand::tool_version);

    gelfand::RunOptions opts;
    std::function<int(const gelfand::RunOptions&)> action;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("-c,--config", opts.config_path,
                                  "experiment config (flat key = value)");
        if (config_required) c->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", opts.out_dir, "output directory (overrides the config)");
        sub->add_option("-t,--threads", opts.threads, "worker threads")
            ->check(CLI::PositiveNumber);
        sub->add_option("-s,--seed", opts.seed, "seed for random test-function sampling");
    };
    auto add_selector = [&](CLI::App* sub) {
        sub->add_option("--at", opts.selector,
                        "branch point: last, all, m=<v> or lambda=<v>");
    };

    auto* branch = app.add_subcommand("branch", "trace the minimal branch and plot it");
    add_common(branch, true);
    branch->callback([&] { action = gelfand::run_branch; });

    auto* audit = app.add_subcommand("audit", "measure the inequality suite on branch points");
    add_common(audit, true);
    add_selector(audit);
    audit->callback([&] { action = gelfand::run_audit; });

    auto* levels = app.add_subcommand("levels", "level-set profiles, curves and coarea checks");
    add_common(levels, true);
    add_selector(levels);
    levels->callback([&] { action = gelfand::run_levels; });

    auto* extremal = app.add_subcommand("extremal", "estimate the extremal parameter");
    add_common(extremal, true);
    extremal->callback([&] { action = gelfand::run_extremal; });

    auto* verify = app.add_subcommand("verify", "run the acceptance criteria end to end");
    add_common(verify, false);
    verify->callback([&] { action = gelfand::run_verify; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints the message; 0 for --help/--version
        return code == 0 ? 0 : 2;
    }

    try {
        return action(opts);
    } catch (const gelfand::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
