// Command-line front end for the eventalpha pipeline. All functionality
// lives behind the C API in libeventalpha; this binary only parses
// arguments, forwards one stage per invocation, and maps statuses to
// exit codes (0 ok, 1 validation, 2 I/O, 3 upstream service).

#include <eventalpha/eventalpha.h>

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <memory>
#include <string>

namespace {

struct RunDeleter {
    void operator()(ea_run* run) const { ea_run_destroy(run); }
};
using RunPtr = std::unique_ptr<ea_run, RunDeleter>;

int to_exit_code(ea_status status) {
    switch (status) {
        case EA_OK: return 0;
        case EA_ERR_IO: return 2;
        case EA_ERR_UPSTREAM: return 3;
        default: return 1;
    }
}

int run_stage(const std::string& stage, const std::string& config_path, const std::string& out_dir) {
    ea_run* raw = nullptr;
    ea_status status = config_path.empty() ? ea_run_create("{}", &raw)
                                           : ea_run_create_from_file(config_path.c_str(), &raw);
    RunPtr run(raw);
    if (status != EA_OK) {
        std::fprintf(stderr, "error: %s\n", ea_last_error());
        return to_exit_code(status);
    }
    if (!out_dir.empty()) {
        status = ea_run_set_out_dir(run.get(), out_dir.c_str());
        if (status != EA_OK) {
            std::fprintf(stderr, "error: %s\n", ea_last_error());
            return to_exit_code(status);
        }
    }
    status = ea_run_stage(run.get(), stage.c_str());
    if (status != EA_OK) {
        std::fprintf(stderr, "error in stage %s: %s\n", stage.c_str(), ea_last_error());
        return to_exit_code(status);
    }
    if (const char* summary = ea_run_last_summary_json(run.get()))
        std::printf("%s\n", summary);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"eventalpha: event-labeled tweet-sentiment factors and backtests"};
    app.set_version_flag("--version", std::string(ea_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string log_level = "warn";
    app.add_option("--config", config_path, "Run configuration JSON file")->envname("EVENTALPHA_CONFIG");
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_option("--log-level", log_level, "error | warn | info | debug")
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

    const char* stages[] = {"synth", "ingest", "annotate", "factors", "backtest", "report"};
    const char* help[] = {
        "Generate a synthetic dataset with planted event effects",
        "Load and validate tweets and prices; compute returns and alignment",
        "Produce tone and event labels per tweet (mock, llm, or replay backend)",
        "Build the cross-sectional exposure panel",
        "Join forward returns and run the portfolio sorts",
        "Render metrics tables and plot-ready data files",
    };
    for (std::size_t i = 0; i < 6; ++i) app.add_subcommand(stages[i], help[i]);

    CLI11_PARSE(app, argc, argv);

    static const std::map<std::string, int> levels = {
        {"error", 0}, {"warn", 1}, {"info", 2}, {"debug", 3}};
    ea_set_log_level(levels.at(log_level));

    for (const auto* sub : app.get_subcommands())
        return run_stage(sub->get_name(), config_path, out_dir);
    return 1;
}
