#include "nearfield/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace nearfield::io {

using nlohmann::json;

namespace {

template <typename Error>
const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw Error(where + " must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error(where + " is missing '" + key + "'");
  return *it;
}

template <typename Error>
double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw Error(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(what + " must be finite");
  return x;
}

template <typename Error>
long long integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw Error(what + " must be an integer");
  return v.get<long long>();
}

template <typename Error>
std::size_t index(const json& v, const std::string& what) {
  const long long i = integer<Error>(v, what);
  if (i < 0) throw Error(what + " must be >= 0");
  return static_cast<std::size_t>(i);
}

template <typename Error>
Vec3 vector3(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3) throw Error(what + " must be an array of 3 numbers");
  const Vec3 out{number<Error>(v[0], what), number<Error>(v[1], what), number<Error>(v[2], what)};
  if (!(out.norm() > 0.0)) throw Error(what + " must be nonzero");
  return out;
}

template <typename Error>
WeightMode weight_mode(const json& v) {
  if (!v.is_string()) throw Error("weight_mode must be a string");
  try {
    return weight_mode_from_string(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw Error(e.what());
  }
}

template <typename Error>
std::vector<Channel> channel_list(const json& v) {
  if (!v.is_array() || v.empty()) throw Error("channels must be a non-empty array");
  std::vector<Channel> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string where = "channels[" + std::to_string(i) + "]";
    Channel c;
    const auto& label = field<Error>(v[i], "label", where);
    if (!label.is_string()) throw Error(where + ".label must be a string");
    c.label = label.template get<std::string>();
    c.k = number<Error>(field<Error>(v[i], "k", where), where + ".k");
    if (v[i].contains("velocity")) c.velocity = number<Error>(v[i]["velocity"], where + ".velocity");
    out.push_back(std::move(c));
  }
  return out;
}

template <typename Error>
ChannelSet make_channels(std::vector<Channel> list, std::size_t entrance, WeightMode mode) {
  try {
    return ChannelSet(std::move(list), entrance, mode);
  } catch (const std::invalid_argument& e) {
    throw Error(e.what());
  }
}

json channels_json(const ChannelSet& channels) {
  json list = json::array();
  for (const auto& c : channels.channels()) {
    json entry{{"label", c.label}, {"k", c.k}};
    if (channels.weight_mode() == WeightMode::velocity_ratio) entry["velocity"] = c.velocity;
    list.push_back(std::move(entry));
  }
  return list;
}

struct Document {
  ChannelSet channels;
  PartialWaveAmplitude amplitude;
};

Document document_from_json(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw DataError(where + " must be an object");
  static const std::set<std::string> known{"channels", "alpha", "weight_mode", "incident", "coefficients"};
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) throw DataError(where + " has unknown field '" + key + "'");
  const WeightMode mode =
      doc.contains("weight_mode") ? weight_mode<DataError>(doc["weight_mode"]) : WeightMode::momentum_ratio;
  const std::size_t alpha = index<DataError>(field<DataError>(doc, "alpha", where), where + ".alpha");
  ChannelSet channels = make_channels<DataError>(channel_list<DataError>(field<DataError>(doc, "channels", where)),
                                                 alpha, mode);
  const Vec3 incident = doc.contains("incident") ? vector3<DataError>(doc["incident"], where + ".incident") : z_axis;
  PartialWaveAmplitude f(channels.size(), alpha, incident);
  const auto& coeffs = field<DataError>(doc, "coefficients", where);
  if (!coeffs.is_array()) throw DataError(where + ".coefficients must be an array");
  std::set<std::tuple<std::size_t, int, int>> seen;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::string at = where + ".coefficients[" + std::to_string(i) + "]";
    const auto& c = coeffs[i];
    const std::size_t beta = index<DataError>(field<DataError>(c, "beta", at), at + ".beta");
    const long long l = integer<DataError>(field<DataError>(c, "l", at), at + ".l");
    const long long m = integer<DataError>(field<DataError>(c, "m", at), at + ".m");
    const double re = number<DataError>(field<DataError>(c, "re", at), at + ".re");
    const double im = number<DataError>(field<DataError>(c, "im", at), at + ".im");
    if (beta >= channels.size()) throw DataError(at + ": beta is not a channel of the channel set");
    if (l < 0 || l > 1000 || std::llabs(m) > l) throw DataError(at + ": mode needs 0 <= l and |m| <= l");
    if (!seen.emplace(beta, static_cast<int>(l), static_cast<int>(m)).second)
      throw DataError(at + ": duplicate coefficient for (beta, l, m)");
    f.set(beta, static_cast<int>(l), static_cast<int>(m), {re, im});
  }
  return {std::move(channels), std::move(f)};
}

}  // namespace

const PartialWaveAmplitude& AmplitudeData::primary() const {
  const auto it = by_entrance.find(channels.entrance());
  if (it == by_entrance.end()) throw DataError("no amplitude for the entrance channel");
  return it->second;
}

AmplitudeSet AmplitudeData::complete_set() const {
  AmplitudeSet set{channels, {}};
  for (std::size_t a = 0; a < channels.size(); ++a) {
    const auto it = by_entrance.find(a);
    if (it == by_entrance.end())
      throw DataError("missing reciprocal amplitude data: no amplitude for entrance channel '" + channels[a].label +
                      "'");
    set.by_entrance.push_back(it->second);
  }
  return set;
}

json to_json(const PartialWaveAmplitude& f, const ChannelSet& channels) {
  json doc{{"channels", channels_json(channels)},
           {"alpha", f.entrance()},
           {"weight_mode", to_string(channels.weight_mode())}};
  if (!(f.incident() == z_axis)) doc["incident"] = {f.incident().x, f.incident().y, f.incident().z};
  json coeffs = json::array();
  for (std::size_t b = 0; b < f.channel_count(); ++b)
    for (const auto& [key, value] : f.modes(b))
      coeffs.push_back({{"beta", b}, {"l", key.first}, {"m", key.second}, {"re", value.real()}, {"im", value.imag()}});
  doc["coefficients"] = std::move(coeffs);
  return doc;
}

json to_json(const AmplitudeData& data) {
  if (data.by_entrance.size() == 1) {
    const auto& [alpha, f] = *data.by_entrance.begin();
    return to_json(f, data.channels.with_entrance(alpha));
  }
  json docs = json::array();
  for (const auto& [alpha, f] : data.by_entrance) docs.push_back(to_json(f, data.channels.with_entrance(alpha)));
  return docs;
}

AmplitudeData amplitude_data_from_json(const json& doc) {
  if (!doc.is_array()) {
    auto d = document_from_json(doc, "amplitude");
    AmplitudeData out{d.channels, {}};
    out.by_entrance.emplace(d.channels.entrance(), std::move(d.amplitude));
    return out;
  }
  if (doc.empty()) throw DataError("amplitude set is empty");
  std::optional<AmplitudeData> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "amplitude[" + std::to_string(i) + "]";
    auto d = document_from_json(doc[i], where);
    if (!out) {
      out.emplace(AmplitudeData{d.channels, {}});
    } else if (channels_json(d.channels) != channels_json(out->channels) ||
               d.channels.weight_mode() != out->channels.weight_mode()) {
      throw DataError(where + " uses a different channel set");
    }
    const std::size_t alpha = d.channels.entrance();
    if (!out->by_entrance.emplace(alpha, std::move(d.amplitude)).second)
      throw DataError(where + " repeats entrance channel " + std::to_string(alpha));
  }
  return std::move(*out);
}

AmplitudeData load_amplitudes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open amplitude file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw DataError("amplitude file " + path.string() + " is not valid JSON: " + e.what());
  }
  return amplitude_data_from_json(doc);
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void save_amplitudes(const AmplitudeData& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump(to_json(data));
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"amplitude", "R",       "grid_degree", "format",    "order",
                                           "weight_mode", "per_angle", "threads", "directions", "tolerances"};
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) throw ConfigError("unknown config field '" + key + "'");

  RunConfig config;
  config.base_dir = base_dir;
  if (doc.contains("amplitude")) {
    config.amplitude = doc["amplitude"];
    if (!config.amplitude.is_object()) throw ConfigError("amplitude must be an object");
  }
  if (doc.contains("R")) {
    const auto& r = doc["R"];
    if (r.is_array()) {
      for (const auto& v : r) config.R.push_back(number<ConfigError>(v, "R entry"));
    } else if (r.is_object()) {
      const double lo = number<ConfigError>(field<ConfigError>(r, "min", "R"), "R.min");
      const double hi = number<ConfigError>(field<ConfigError>(r, "max", "R"), "R.max");
      const long long points = integer<ConfigError>(field<ConfigError>(r, "points", "R"), "R.points");
      if (points < 1 || points > 100000) throw ConfigError("R.points must be in [1, 100000]");
      if (!(lo > 0.0)) throw ConfigError("R schedule must be strictly positive");
      if (points == 1) {
        config.R.push_back(lo);
      } else {
        for (long long i = 0; i < points; ++i)
          config.R.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1)));
        config.R.back() = hi;
      }
    } else {
      throw ConfigError("R must be a list or {min, max, points}");
    }
    for (std::size_t i = 0; i < config.R.size(); ++i) {
      if (!(config.R[i] > 0.0)) throw ConfigError("R schedule must be strictly positive");
      if (i > 0 && !(config.R[i] > config.R[i - 1])) throw ConfigError("R schedule must be strictly increasing");
    }
  }
  if (doc.contains("grid_degree")) {
    const long long g = integer<ConfigError>(doc["grid_degree"], "grid_degree");
    if (g < 1 || g > 400) throw ConfigError("grid_degree must be in [1, 400]");
    config.grid_degree = static_cast<int>(g);
  }
  if (doc.contains("format")) {
    const auto& f = doc["format"];
    if (f == "csv") config.format = OutputFormat::csv;
    else if (f == "json") config.format = OutputFormat::json;
    else throw ConfigError("format must be \"csv\" or \"json\"");
  }
  if (doc.contains("order")) {
    const long long o = integer<ConfigError>(doc["order"], "order");
    if (o < 0 || o > 4) throw ConfigError("order must be in [0, 4]");
    config.order = static_cast<int>(o);
  }
  if (doc.contains("weight_mode")) config.weight_mode = weight_mode<ConfigError>(doc["weight_mode"]);
  if (doc.contains("per_angle")) {
    if (!doc["per_angle"].is_boolean()) throw ConfigError("per_angle must be true or false");
    config.per_angle = doc["per_angle"].get<bool>();
  }
  if (doc.contains("threads")) {
    const long long t = integer<ConfigError>(doc["threads"], "threads");
    if (t < 1 || t > 256) throw ConfigError("threads must be in [1, 256]");
    config.threads = static_cast<unsigned>(t);
  }
  if (doc.contains("directions")) {
    const auto& d = doc["directions"];
    if (!d.is_array() || d.empty()) throw ConfigError("directions must be a non-empty list of [x, y, z]");
    for (const auto& v : d) config.directions.push_back(vector3<ConfigError>(v, "direction").normalized());
  }
  if (doc.contains("tolerances")) {
    const auto& t = doc["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    const std::map<std::string, double*> slots{{"conservation", &config.tolerances.conservation},
                                              {"unitarity", &config.tolerances.unitarity},
                                              {"optical", &config.tolerances.optical},
                                              {"greens", &config.tolerances.greens},
                                              {"two_path", &config.tolerances.two_path}};
    for (const auto& [key, value] : t.items()) {
      const auto it = slots.find(key);
      if (it == slots.end()) throw ConfigError("unknown tolerance '" + key + "'");
      const double x = number<ConfigError>(value, "tolerance " + key);
      if (!(x > 0.0)) throw ConfigError("tolerance " + key + " must be > 0");
      *it->second = x;
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

AmplitudeData resolve_amplitudes(const RunConfig& config) {
  const json& src = config.amplitude;
  if (src.is_null()) throw ConfigError("config has no amplitude source");
  const bool has_file = src.contains("file");
  const bool has_model = src.contains("model");
  if (has_file == has_model) throw ConfigError("amplitude needs exactly one of 'file' or 'model'");

  auto with_mode = [&](AmplitudeData data) {
    if (!config.weight_mode || *config.weight_mode == data.channels.weight_mode()) return data;
    data.channels = make_channels<DataError>(data.channels.channels(), data.channels.entrance(), *config.weight_mode);
    return data;
  };

  if (has_file) {
    if (!src["file"].is_string()) throw ConfigError("amplitude.file must be a path");
    std::filesystem::path path = src["file"].get<std::string>();
    if (path.is_relative()) path = config.base_dir / path;
    return with_mode(load_amplitudes(path));
  }

  if (!src["model"].is_string()) throw ConfigError("amplitude.model must be a string");
  const std::string model = src["model"].get<std::string>();
  auto l_max_of = [&]() {
    const long long l = integer<ConfigError>(field<ConfigError>(src, "l_max", "amplitude"), "amplitude.l_max");
    if (l < 0 || l > 60) throw ConfigError("amplitude.l_max must be in [0, 60]");
    return static_cast<int>(l);
  };
  const WeightMode mode = config.weight_mode.value_or(WeightMode::momentum_ratio);

  if (model == "hard_sphere") {
    const double k = number<ConfigError>(field<ConfigError>(src, "k", "amplitude"), "amplitude.k");
    const double a = number<ConfigError>(field<ConfigError>(src, "a", "amplitude"), "amplitude.a");
    if (!(k > 0.0) || !(a > 0.0)) throw ConfigError("hard_sphere needs k > 0 and a > 0");
    const auto channels = make_channels<ConfigError>({{"elastic", k, k}}, 0, mode);
    AmplitudeData data{channels, {}};
    data.by_entrance.emplace(0, amplitudes_from_smatrix(hard_sphere_model(k, a, l_max_of()), channels));
    return data;
  }
  if (model == "random_unitary") {
    const auto channels = make_channels<ConfigError>(
        channel_list<ConfigError>(field<ConfigError>(src, "channels", "amplitude")),
        src.contains("alpha") ? index<ConfigError>(src["alpha"], "amplitude.alpha") : 0, mode);
    const auto seed = src.contains("seed") ? index<ConfigError>(src["seed"], "amplitude.seed") : 1;
    const auto set = amplitude_set_from_smatrix(random_unitary_model(channels.size(), l_max_of(), seed), channels);
    AmplitudeData data{channels, {}};
    for (std::size_t a = 0; a < set.by_entrance.size(); ++a) data.by_entrance.emplace(a, set.by_entrance[a]);
    return data;
  }
  if (model == "single_mode") {
    const double k = number<ConfigError>(field<ConfigError>(src, "k", "amplitude"), "amplitude.k");
    const long long l = integer<ConfigError>(field<ConfigError>(src, "l", "amplitude"), "amplitude.l");
    const long long m = src.contains("m") ? integer<ConfigError>(src["m"], "amplitude.m") : 0;
    const double re = src.contains("re") ? number<ConfigError>(src["re"], "amplitude.re") : 1.0;
    const double im = src.contains("im") ? number<ConfigError>(src["im"], "amplitude.im") : 0.0;
    if (l < 0 || l > 60 || std::llabs(m) > l) throw ConfigError("single_mode needs 0 <= l <= 60 and |m| <= l");
    const auto channels = make_channels<ConfigError>({{"elastic", k, k}}, 0, mode);
    PartialWaveAmplitude f(1);
    f.set(0, static_cast<int>(l), static_cast<int>(m), {re, im});
    AmplitudeData data{channels, {}};
    data.by_entrance.emplace(0, std::move(f));
    return data;
  }
  throw ConfigError("unknown amplitude model '" + model + "'");
}

int effective_grid_degree(const RunConfig& config, int l_max, std::ostream& warnings) {
  const int L = std::max(l_max, 0);
  if (!config.grid_degree) return default_grid_order(L);
  if (*config.grid_degree < 2 * L) {
    warnings << "warning: grid_degree " << *config.grid_degree << " is below 2*L_max = " << 2 * L
             << "; raised to " << std::max(2 * L, 1) << "\n";
    return std::max(2 * L, 1);
  }
  return *config.grid_degree;
}

std::string format_number(double x) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, result.ptr};
}

namespace {

std::pair<double, double> angles(const Vec3& n) {
  return {std::acos(std::clamp(n.z, -1.0, 1.0)), std::atan2(n.y, n.x)};
}

}  // namespace

std::vector<double> asymptotic_deviation(const PartialWaveAmplitude& f, const ChannelSet& channels,
                                         const FluxProfile& p, int order) {
  std::vector<double> out;
  for (std::size_t i = 0; i < p.R_values.size(); ++i) {
    double worst = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < p.grid.size(); ++q) {
      const double exact = p.differential[i][q];
      worst = std::max(worst, std::abs(exact - differential_flux_asymptotic(f, channels, p.R_values[i],
                                                                             p.grid.nodes[q], order)));
      scale = std::max(scale, std::abs(exact));
    }
    out.push_back(scale > 0.0 ? worst / scale : worst);
  }
  return out;
}

void write_profile_csv(const FluxProfile& p, const ChannelSet& channels, std::span<const double> deviation,
                       bool per_angle, std::ostream& out) {
  out << "R";
  for (const auto& c : channels.channels()) out << ",kR_" << c.label;
  out << ",total_flux,sigma_sum,min_dflux,max_dflux,asymptotic_deviation,below_validity\n";
  for (std::size_t i = 0; i < p.R_values.size(); ++i) {
    out << format_number(p.R_values[i]);
    for (const auto& c : channels.channels()) out << ',' << format_number(c.k * p.R_values[i]);
    out << ',' << format_number(p.total[i]) << ',' << format_number(p.sigma_sum) << ','
        << format_number(p.min_differential[i]) << ',' << format_number(p.max_differential[i]) << ','
        << format_number(deviation[i]) << ',' << (p.below_validity[i] ? 1 : 0) << '\n';
  }
  if (!per_angle) return;
  out << "\nR,theta,phi,weight,dflux\n";
  for (std::size_t i = 0; i < p.R_values.size(); ++i)
    for (std::size_t q = 0; q < p.grid.size(); ++q) {
      const auto [theta, phi] = angles(p.grid.nodes[q]);
      out << format_number(p.R_values[i]) << ',' << format_number(theta) << ',' << format_number(phi) << ','
          << format_number(p.grid.weights[q]) << ',' << format_number(p.differential[i][q]) << '\n';
    }
}

json profile_to_json(const FluxProfile& p, const ChannelSet& channels, std::span<const double> deviation, int order,
                     bool per_angle) {
  json kR = json::object();
  for (const auto& c : channels.channels()) {
    json row = json::array();
    for (double R : p.R_values) row.push_back(c.k * R);
    kR[c.label] = std::move(row);
  }
  json doc{{"R", p.R_values},
           {"kR", std::move(kR)},
           {"total_flux", p.total},
           {"sigma_sum", p.sigma_sum},
           {"min_dflux", p.min_differential},
           {"max_dflux", p.max_differential},
           {"asymptotic_order", order},
           {"asymptotic_deviation", std::vector<double>(deviation.begin(), deviation.end())},
           {"below_validity", p.below_validity},
           {"grid_degree", p.grid.order}};
  if (per_angle) {
    json theta = json::array(), phi = json::array();
    for (const auto& n : p.grid.nodes) {
      const auto [t, f] = angles(n);
      theta.push_back(t);
      phi.push_back(f);
    }
    doc["grid"] = {{"theta", std::move(theta)}, {"phi", std::move(phi)}, {"weights", p.grid.weights}};
    doc["dflux"] = p.differential;
  }
  return doc;
}

}  // namespace nearfield::io
