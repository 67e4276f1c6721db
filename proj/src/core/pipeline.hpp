#pragma once

#include "core/config.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace eventalpha {

// Stage orchestration. Stages communicate exclusively through files
// under <out>/<stage>/ and each stage writes a manifest.json recording
// its effective config, input digests, and counts. Running the same
// config twice yields byte-identical output trees.
class Pipeline {
public:
    explicit Pipeline(RunConfig config);

    // stage in {synth, ingest, annotate, factors, backtest, report};
    // returns the stage manifest.
    nlohmann::json run_stage(const std::string& stage);

    nlohmann::json run_synth();
    nlohmann::json run_ingest();
    nlohmann::json run_annotate();
    nlohmann::json run_factors();
    nlohmann::json run_backtest();
    nlohmann::json run_report();

    const RunConfig& config() const { return config_; }

private:
    std::string stage_dir(const std::string& stage) const;
    std::string stage_file(const std::string& stage, const std::string& name) const;

    // Configured path if set, else the synth output of the same name;
    // fails with MissingInput when neither exists.
    std::string resolve_input(const std::string& configured, const std::string& synth_name,
                              const std::string& what) const;
    std::string require_stage_file(const std::string& stage, const std::string& name) const;

    nlohmann::json finish_stage(const std::string& stage, nlohmann::json counts,
                                nlohmann::json inputs, double wall_ms) const;

    RunConfig config_;
};

} // namespace eventalpha
