// remix: check, run and inspect exchange scenarios.
//
// Exit codes: 0 success, 1 validation or engine failure, 2 parse error
// (including unreadable files and bad command lines).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "remix/engine.hpp"
#include "remix/error.hpp"
#include "remix/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitParse = 2;

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        std::cerr << "remix: cannot write " << path << "\n";
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed Internet-exchange simulator"};
    app.require_subcommand(1);

    std::string file;
    std::string report_path;
    std::string trace_path;
    std::string layer = "physical";
    std::optional<std::size_t> max_rounds;

    auto* check = app.add_subcommand("check", "Parse and validate a scenario");
    check->add_option("file", file, "Scenario file")->required();

    auto* run = app.add_subcommand("run", "Converge, apply events and write the report");
    run->add_option("file", file, "Scenario file")->required();
    run->add_option("--report", report_path, "Write the report here instead of stdout");
    run->add_option("--trace", trace_path, "Write the frame trace (CSV) here");
    run->add_option("--max-rounds", max_rounds, "Override the convergence round cap");

    auto* dot = app.add_subcommand("dot", "Render one layer as Graphviz");
    dot->add_option("file", file, "Scenario file")->required();
    dot->add_option("--layer", layer, "physical, vpls or peering")
        ->check(CLI::IsMember({"physical", "vpls", "peering"}));
    dot->add_option("--max-rounds", max_rounds, "Override the convergence round cap");

    auto* ribs = app.add_subcommand("ribs", "Dump every member's selected routes");
    ribs->add_option("file", file, "Scenario file")->required();
    ribs->add_option("--max-rounds", max_rounds, "Override the convergence round cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitParse;
    }

    remix::Scenario scenario;
    try {
        scenario = remix::load_scenario(file);
    } catch (const remix::ParseError& e) {
        std::cerr << file << ":" << e.what() << "\n";
        return e.is_validation() ? kExitInvalid : kExitParse;
    }
    if (check->parsed()) {
        return kExitOk;
    }

    try {
        remix::Engine engine(std::move(scenario), remix::EngineOptions{max_rounds});
        engine.run();
        if (run->parsed()) {
            const auto report = engine.report().str();
            if (report_path.empty()) {
                std::cout << report;
            } else if (!write_file(report_path, report)) {
                return kExitInvalid;
            }
            if (!trace_path.empty() && !write_file(trace_path, engine.trace_csv())) {
                return kExitInvalid;
            }
        } else if (dot->parsed()) {
            std::cout << remix::export_dot(engine, *remix::parse_dot_layer(layer));
        } else if (ribs->parsed()) {
            std::cout << engine.rib_dump();
        }
    } catch (const remix::Error& e) {
        std::cerr << "remix: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitOk;
}
