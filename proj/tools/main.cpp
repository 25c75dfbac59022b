#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfl/config.hpp"
#include "mfl/errors.hpp"
#include "mfl/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mean-field limit experiments: particle SDEs, the McKean-Vlasov PDE and checks between them."};
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "INI experiment file")->required();
    app.add_option("--out", out_dir, "output directory (overrides out_dir)");
    app.add_option("--seed", seed, "master seed (overrides seed)");
    CLI11_PARSE(app, argc, argv);

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot read " << config_path << '\n';
        return 2;
    }
    std::stringstream text;
    text << in.rdbuf();

    try {
        auto config = mfl::parse_config(text.str(), seed);
        if (!out_dir.empty()) config.out_dir = out_dir;
        return mfl::run(config, std::cout);
    } catch (const mfl::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
    } catch (const mfl::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return 2;
}
