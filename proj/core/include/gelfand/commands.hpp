#pragma once

#include <cstdint>
#include <string>

namespace gelfand {

// Options shared by every subcommand. out_dir empty means "use the config's
// output.directory"; selector picks branch points for audit/levels
// ("last", "all", "m=<v>", "lambda=<v>"). The seed only drives random
// test-function sampling.
struct RunOptions {
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::uint64_t seed = 0;
    std::string selector = "last";
};

// Commands return 0 on success and throw on failure (ConfigError for bad
// configs, DataError for corrupt caches, runtime_error for bad selectors);
// the executable translates exceptions into exit codes. Progress and
// warnings go to stderr, results to stdout.
int run_branch(const RunOptions& opts);
int run_audit(const RunOptions& opts);
int run_levels(const RunOptions& opts);
int run_extremal(const RunOptions& opts);
int run_verify(const RunOptions& opts);  // defined with the acceptance suite

}  // namespace gelfand
