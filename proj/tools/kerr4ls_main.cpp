// kerr4ls: spectrum / kerr / sweep / evolve / converge analysis of the
// four-level N-scheme. Reads a flat JSON config, writes CSV or JSON.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kerr4ls/cli.hpp"

namespace {

nlohmann::json load_config(const std::string& path) {
    std::string text;
    if (path == "-") {
        std::ostringstream oss;
        oss << std::cin.rdbuf();
        text = oss.str();
    } else {
        std::ifstream in(path);
        if (!in) throw kerr4ls::config_error("cannot open config file: " + path);
        std::ostringstream oss;
        oss << in.rdbuf();
        text = oss.str();
    }
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw kerr4ls::config_error(std::string("config is not valid JSON: ") +
                                    e.what());
    }
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw kerr4ls::config_error("cannot open output file: " + path);
    out << content;
}

void emit_error(const char* type, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"]["type"] = type;
    j["error"]["message"] = message;
    std::cerr << j.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"four-level N-scheme cross-Kerr analysis"};
    app.require_subcommand(1);

    std::string config_path = "-";
    std::string output_path;
    std::string format;

    for (const char* name :
         {"spectrum", "kerr", "sweep", "evolve", "converge"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config JSON path or - for stdin");
        sub->add_option("--output", output_path, "output path (default stdout)");
        sub->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const kerr4ls::RunConfig cfg =
            kerr4ls::parse_config(load_config(config_path));

        std::string content;
        if (command == "kerr") {
            if (format == "csv")
                throw kerr4ls::config_error("kerr emits JSON only");
            content = kerr4ls::run_kerr(cfg).dump(2) + "\n";
        } else {
            kerr4ls::Table table;
            if (command == "spectrum") table = kerr4ls::run_spectrum(cfg);
            else if (command == "sweep") table = kerr4ls::run_sweep(cfg);
            else if (command == "evolve") table = kerr4ls::run_evolve(cfg);
            else table = kerr4ls::run_converge(cfg);
            content = (format == "json") ? kerr4ls::to_json(table)
                                         : kerr4ls::to_csv(table);
        }
        write_output(output_path, content);
        return 0;
    } catch (const kerr4ls::config_error& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const kerr4ls::physics_error& e) {
        emit_error("physics", e.what());
        return 3;
    } catch (const kerr4ls::solver_error& e) {
        emit_error("solver", e.what());
        return 4;
    }
}
