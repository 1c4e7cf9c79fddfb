#pragma once

// Serialization: JSON for configs, trains and summaries; CSV for records and
// matrices. Numbers are written in shortest round-trip form, so files are
// byte-stable and re-parse to identical doubles.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "echoqm/ensemble.hpp"
#include "echoqm/metrology.hpp"
#include "echoqm/protocol.hpp"
#include "echoqm/pulse.hpp"
#include "echoqm/wigner.hpp"

namespace echoqm {

using Json = nlohmann::ordered_json;

std::string format_double(double value);

Json to_json(const PulseTrain& train);
PulseTrain pulse_train_from_json(const Json& j);

Json to_json(const ProtocolConfig& config);
/// Unknown or mistyped fields throw ConfigParse; the result is validated.
ProtocolConfig config_from_json(const Json& j);
ProtocolConfig load_config(const std::filesystem::path& path);

/// Applies "key=value"; dotted keys reach into the fluctuation block.
void apply_override(ProtocolConfig& config, std::string_view assignment);

/// FNV-1a of the canonical config JSON, as 16 hex digits.
std::string config_hash(const ProtocolConfig& config);

Json to_json(const ProtocolOutcome& outcome);
Json to_json(const PropagationReport& report);
Json to_json(const MetrologyRecord& record);
Json to_json(const PowerLawFit& fit);
Json to_json(const EnsembleSummary& summary);

inline constexpr std::string_view kRecordsHeader =
    "seed,kind,d,epsilon,chiT,tau,kappa,eps_dp,n_mean,n_var,theta_b,cfi_max,gain_max,qfi";

std::string records_csv(const std::vector<MetrologyRecord>& records);
/// Parses the records schema; SchemaMismatch on a foreign header or malformed row.
std::vector<MetrologyRecord> parse_records_csv(std::string_view text);

/// First row: corner label then column axis; every other row: row axis value then data.
std::string matrix_csv(std::string_view corner, const std::vector<double>& row_axis,
                       const std::vector<double>& col_axis, const RMatrix& values);

std::string wigner_csv(const WignerGrid& grid);
Json wigner_sidecar(const WignerGrid& grid, double half_extent, int resolution, const std::string& hash);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Named operating points, each with a Fock dimension that passes the tail guard.
const std::map<std::string, ProtocolConfig>& presets();
ProtocolConfig preset(const std::string& name);

}  // namespace echoqm
