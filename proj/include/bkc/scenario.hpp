#pragma once

// Scenario configs, execution and dataset emission behind the command-line tool.
//
// A config is a JSON object with a strict key set:
//   kind   optional, must match the requested scenario
//   seed   optional unsigned integer, overridden by --seed
//   chain  chain parameters, frequencies in Hz
//   <kind> optional block of scenario parameters ("phase-diagram" etc.)
// Unknown keys are schema errors. Frequencies are converted to rad/s on ingestion and
// written back in Hz, with the unit in the column name.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bkc/chain_model.hpp"

namespace bkc::cli {

using json = nlohmann::ordered_json;

struct schema_error : std::invalid_argument {
    std::vector<std::string> issues;
    explicit schema_error(std::vector<std::string> list);
};

enum class ScenarioKind { respond, spectrum, phase_diagram, thermal, sense, simulate, tones };

const char* to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);
const std::vector<ScenarioKind>& all_scenario_kinds();

struct Dataset {
    std::string file;
    std::string format;  // "csv" or "txt"
    std::size_t rows = 0;
    std::string content;
};

struct ScenarioResult {
    ScenarioKind kind = ScenarioKind::respond;
    std::uint64_t seed = 0;
    json resolved;  // full parameter set after defaults
    json summary;   // scalar results
    std::vector<std::string> warnings;
    std::vector<Dataset> datasets;
};

struct RunOptions {
    bool seed_given = false;  // --seed overrides the config
    std::uint64_t seed = 0;
    unsigned threads = 1;     // does not change any output
};

// Parses config text; empty text is an empty object. Syntax errors carry line and column.
json parse_config(const std::string& text);

// Chain block <-> ChainSpec. The json side is in Hz.
ChainSpec chain_from_json(const json& j);
json chain_to_json(const ChainSpec& s);

ScenarioResult run_scenario(ScenarioKind kind, const json& config, const RunOptions& opt = {});

std::string sha256_hex(const std::string& data);

// Manifest: tool, version, kind, seed, resolved config, summary, warnings, datasets with checksums.
json manifest(const ScenarioResult& r);

// Writes every dataset and manifest.json into dir (created if missing).
void write_outputs(const std::string& dir, const ScenarioResult& r);

} // namespace bkc::cli
