#include <string>

#include "CLI11.hpp"

#include "signshape/cli.hpp"
#include "signshape/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"signshape: shape optimization of sign-changing cost functionals on a box"};
    app.set_version_flag("--version", signshape::kVersion);

    std::string command, config_path, out_dir = "out";
    signshape::RunOptions opts;

    app.add_option("command", command,
                   "one of: dirichlet, obstacle, optimize, radial, rearrange, stochastic, verify")
        ->required();
    app.add_option("--config", config_path, "path to the JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (artifacts use fixed file names)");
    app.add_option("--threads", opts.threads, "bound for parallel member solves")->check(CLI::PositiveNumber);
    app.add_option("--preset", opts.preset, "named resolution preset")
        ->check(CLI::IsMember({"small", "medium", "large"}));

    CLI11_PARSE(app, argc, argv);
    return signshape::run(command, config_path, out_dir, opts);
}
