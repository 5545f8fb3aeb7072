#include "weakkam/io.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"weakkam: discrete weak KAM and Aubry-Mather solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool check_only = false;
    const std::vector<std::string> commands = {"solve",      "mather", "discounted",
                                               "degenerate", "twist",  "triangle"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_flag("--check", check_only, "run the invariant checks only, emit no files");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        weakkam::RunConfig cfg = weakkam::load_config(config_path, command, out_dir);
        weakkam::RunReport rep = weakkam::run(cfg, check_only);
        std::cout << rep.to_json().dump(2) << std::endl;
        if (!rep.all_checks_pass()) {
            std::cerr << "weakkam: invariant checks failed" << std::endl;
            return 1;
        }
        return 0;
    } catch (const weakkam::DomainError& e) {
        std::cerr << "weakkam: config error: " << e.what() << std::endl;
        return 2;
    } catch (const weakkam::NumericalError& e) {
        std::cerr << "weakkam: numerical failure: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "weakkam: " << e.what() << std::endl;
        return 2;
    }
}
