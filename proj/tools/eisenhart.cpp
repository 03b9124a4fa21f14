#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eisenhart/config.hpp"
#include "eisenhart/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Eisenhart-lift linearization of one-dimensional Newtonian systems"};
    std::string command, config_path, out_path, format;
    bool verbose = false;
    app.add_option("command", command, "curvature | flatness | lift | integrate | roundtrip | suite")
        ->required()
        ->check(CLI::IsMember({"curvature", "flatness", "lift", "integrate", "roundtrip", "suite"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_path, "write the report here instead of stdout");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--verbose", verbose, "progress and summaries on stderr");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : eisenhart::kExitInvalidConfig;
    }

    eisenhart::RunConfig config;
    try {
        std::ifstream in(config_path);
        if (!in) throw eisenhart::ConfigError("cannot read config file '" + config_path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw eisenhart::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (j.is_object() && !j.contains("command")) j["command"] = command;
        config = eisenhart::parse_config(j);
        if (eisenhart::to_string(config.command) != command) {
            throw eisenhart::ConfigError("command '" + command + "' does not match config command '" +
                                         std::string(eisenhart::to_string(config.command)) + "'");
        }
    } catch (const std::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return eisenhart::kExitInvalidConfig;
    }
    if (!out_path.empty()) config.output_path = out_path;
    if (format == "csv") config.format = eisenhart::OutputFormat::Csv;
    if (format == "json") config.format = eisenhart::OutputFormat::Json;
    config.verbose = verbose;
    return eisenhart::run(config, std::cout, std::cerr);
}
