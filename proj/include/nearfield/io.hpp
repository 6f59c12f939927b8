#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nearfield/amplitudes.hpp"
#include "nearfield/flux.hpp"

namespace nearfield::io {

/// Malformed or inconsistent run configuration (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loaded data violates an invariant of the model (exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Amplitudes of one channel set, keyed by entrance channel. A single
/// document carries one entrance; an array of documents may carry all of them.
struct AmplitudeData {
  ChannelSet channels;
  std::map<std::size_t, PartialWaveAmplitude> by_entrance;

  /// The entrance named by the channel set.
  const PartialWaveAmplitude& primary() const;
  /// Throws DataError naming the first entrance without data.
  AmplitudeSet complete_set() const;
};

nlohmann::json to_json(const PartialWaveAmplitude& f, const ChannelSet& channels);
nlohmann::json to_json(const AmplitudeData& data);

/// Accepts a single amplitude document or an array of documents sharing one
/// channel list. Throws DataError on any schema or invariant violation.
AmplitudeData amplitude_data_from_json(const nlohmann::json& doc);

AmplitudeData load_amplitudes(const std::filesystem::path& path);
void save_amplitudes(const AmplitudeData& data, const std::filesystem::path& path);
std::string dump(const nlohmann::json& doc);

struct Tolerances {
  double conservation = 1e-9;
  double unitarity = 1e-10;
  double optical = 1e-10;
  double greens = 1e-9;
  double two_path = 1e-10;
};

enum class OutputFormat { csv, json };

struct RunConfig {
  nlohmann::json amplitude;  ///< {"file": path} or {"model": name, ...}
  std::filesystem::path base_dir;
  std::vector<double> R;
  std::optional<int> grid_degree;
  OutputFormat format = OutputFormat::csv;
  int order = 4;
  std::optional<WeightMode> weight_mode;
  bool per_angle = false;
  unsigned threads = 1;
  std::vector<Vec3> directions;
  Tolerances tolerances;
};

/// Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Builds the amplitudes named by the config's amplitude source.
AmplitudeData resolve_amplitudes(const RunConfig& config);

/// Grid degree for a run: the configured degree, raised to 2 L_max when too
/// small (a warning is written to `warnings`), default 2 L_max + 4.
int effective_grid_degree(const RunConfig& config, int l_max, std::ostream& warnings);

/// Shortest round-trip decimal form of a double.
std::string format_number(double x);

/// Per R: max over grid nodes of |exact - asymptotic(order)| relative to the
/// largest exact differential flux.
std::vector<double> asymptotic_deviation(const PartialWaveAmplitude& f, const ChannelSet& channels,
                                         const FluxProfile& profile, int order);

void write_profile_csv(const FluxProfile& profile, const ChannelSet& channels, std::span<const double> deviation,
                       bool per_angle, std::ostream& out);
nlohmann::json profile_to_json(const FluxProfile& profile, const ChannelSet& channels,
                               std::span<const double> deviation, int order, bool per_angle);

}  // namespace nearfield::io
