#include "nearfield/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "nearfield/flux.hpp"
#include "nearfield/greens.hpp"
#include "nearfield/io.hpp"

namespace nearfield::cli {

namespace {

// Running maximum that keeps a NaN once seen, so a NaN defect can never pass.
double worse(double worst, double x) { return std::isnan(worst) || std::isnan(x) ? NAN : std::max(worst, x); }


using nlohmann::json;

struct Options {
  std::string config;
  std::string format;
  std::string out;
  std::string which;
  int l = 3;
  int j = 0;
  bool j_given = false;
  bool table = false;
};

io::OutputFormat resolve_format(const Options& opt, const io::RunConfig* config) {
  if (opt.format == "json") return io::OutputFormat::json;
  if (opt.format == "csv") return io::OutputFormat::csv;
  return config ? config->format : io::OutputFormat::csv;
}

std::string sci(double x) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << x;
  return s.str();
}

std::vector<double> default_schedule() { return {0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4}; }

std::vector<Vec3> default_directions() { return {z_axis, direction(1.1, 0.4), direction(2.3, -2.0)}; }

// ---- flux ----

void cmd_flux(const io::RunConfig& config, io::OutputFormat format, std::ostream& out, std::ostream& err) {
  if (config.R.empty()) throw io::ConfigError("flux needs an R schedule");
  const auto data = io::resolve_amplitudes(config);
  const auto& f = data.primary();
  const auto grid = gauss_legendre_sphere(io::effective_grid_degree(config, f.l_max(), err));
  const auto profile = flux_profile(f, data.channels, config.R, grid, config.threads);
  const auto deviation = io::asymptotic_deviation(f, data.channels, profile, config.order);
  std::size_t flagged = 0;
  for (bool b : profile.below_validity) flagged += b;
  if (flagged) err << "note: " << flagged << " R value(s) have some k R < 1, outside the inverse-distance regime\n";
  if (format == io::OutputFormat::csv) {
    io::write_profile_csv(profile, data.channels, deviation, config.per_angle, out);
  } else {
    out << io::dump(io::profile_to_json(profile, data.channels, deviation, config.order, config.per_angle));
  }
}

// ---- coeffs ----

json coefficient_rows(int j, int l) {
  const auto series = wronskian_series(j, l);
  json rows = json::array();
  for (std::size_t n = 0; n < series.correction.size(); ++n) {
    const auto& a = series.correction[n];
    rows.push_back({{"n", n},
                    {"numerator", boost::multiprecision::numerator(a).str()},
                    {"denominator", boost::multiprecision::denominator(a).str()}});
  }
  return rows;
}

void cmd_coeffs(const Options& opt, io::OutputFormat format, std::ostream& out) {
  if (opt.l < 0 || opt.j < 0) throw io::ConfigError("l and j must be >= 0");
  if (opt.table) {
    const int l = opt.l;
    std::vector<WronskianSeries> columns;
    for (int j = 0; j <= l; ++j) columns.push_back(wronskian_series(j, l));
    if (format == io::OutputFormat::json) {
      json table = json::array();
      for (const auto& s : columns) {
        json entries = json::array();
        for (const auto& a : s.correction) entries.push_back(to_string(a));
        table.push_back({{"j", s.j}, {"delta", s.delta}, {"A", std::move(entries)}});
      }
      out << io::dump({{"l", l}, {"columns", std::move(table)}});
      return;
    }
    out << "n";
    for (int j = 0; j <= l; ++j) out << ",j=" << j;
    out << '\n';
    for (int n = 0; n < 2 * l; ++n) {
      out << n;
      for (const auto& s : columns) {
        out << ',';
        if (static_cast<std::size_t>(n) < s.correction.size()) out << to_string(s.correction[n]);
      }
      out << '\n';
    }
    return;
  }
  if (!opt.j_given) throw io::ConfigError("coeffs needs --j (or --table)");
  const auto rows = coefficient_rows(opt.j, opt.l);
  const long delta = delta_jl(opt.j, opt.l);
  if (format == io::OutputFormat::json) {
    json doc{{"l", opt.l}, {"j", opt.j}, {"delta", delta}, {"upsilon", upsilon_jl(opt.j, opt.l)}, {"rows", rows}};
    if (delta == 0) doc["note"] = "Δ=0";
    out << io::dump(doc);
    return;
  }
  if (delta == 0) out << "# Δ=0\n";
  out << "n,numerator,denominator\n";
  for (const auto& r : rows)
    out << r["n"].get<std::size_t>() << ',' << r["numerator"].get<std::string>() << ','
        << r["denominator"].get<std::string>() << '\n';
}

// ---- check ----

struct Report {
  json lines = json::array();
  bool pass = true;

  void add(const std::string& name, const std::string& where, double defect, double tol, bool ok) {
    lines.push_back({{"check", name}, {"case", where}, {"defect", defect}, {"tolerance", tol}, {"pass", ok}});
    pass = pass && ok;
  }
  void info(const std::string& name, const std::string& text) {
    lines.push_back({{"check", name}, {"info", text}});
  }
};

std::string at_R(std::optional<double> R) { return R ? "R=" + io::format_number(*R) : "R=inf"; }

void check_greens(const io::RunConfig& config, Report& report) {
  // Fixed battery: r/R <= 0.5, kR in [2, 100], automatic multipole cutoff.
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_direction = [&] { return direction(std::acos(2 * unit(rng) - 1), 2 * std::numbers::pi * unit(rng)); };
  double worst = 0.0;
  double worst_structure = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double kR = 2.0 + 98.0 * unit(rng);
    const double ratio = 0.5 * unit(rng);
    const GreensQuery q{1.0, random_direction() * kR, random_direction() * (ratio * kR),
                        i % 2 ? WaveSign::incoming : WaveSign::outgoing};
    const Complex exact = greens_point(q);
    worst = worse(worst, std::abs(greens_multipole(q) - exact) / std::abs(exact));
    const Complex m8 = greens_multipole(q, 8);
    worst_structure = worse(worst_structure, std::abs(greens_asymptotic(q, 8, 8) - m8) / std::abs(m8));
  }
  const double tol = config.tolerances.greens;
  report.add("greens", "multipole vs point, 100 queries", worst, tol, worst < tol);
  report.add("greens", "asymptotic(S=l_max) vs multipole, l_max=8", worst_structure, 1e-12, worst_structure < 1e-12);
}

void check_unitarity(const io::RunConfig& config, Report& report, std::ostream& err) {
  const auto data = io::resolve_amplitudes(config);
  const auto set = data.complete_set();
  int l_max = -1;
  for (const auto& f : set.by_entrance) l_max = std::max(l_max, f.l_max());
  const auto grid = gauss_legendre_sphere(io::effective_grid_degree(config, l_max, err));
  const auto directions = config.directions.empty() ? default_directions() : config.directions;
  std::vector<std::optional<double>> Rs{std::nullopt};
  for (double R : config.R.empty() ? default_schedule() : config.R) Rs.emplace_back(R);
  const double tol = config.tolerances.unitarity;
  for (const auto& R : Rs) {
    const double d = unitarity_defect(set, directions, grid, R);
    report.add("unitarity", at_R(R), d, tol, d < tol);
  }
}

void check_optical(const io::RunConfig& config, Report& report, std::ostream& err) {
  const auto data = io::resolve_amplitudes(config);
  const auto& f = data.primary();
  const int order = io::effective_grid_degree(config, f.l_max(), err);
  std::vector<std::optional<double>> Rs{std::nullopt};
  for (double R : config.R.empty() ? default_schedule() : config.R) Rs.emplace_back(R);
  const double tol = config.tolerances.optical;
  for (const auto& R : Rs) {
    const double d = optical_theorem_defect(f, data.channels, R, order);
    report.add("optical", at_R(R), d, tol, d < tol);
  }
}

void check_conservation(const io::RunConfig& config, Report& report, std::ostream& err) {
  const auto data = io::resolve_amplitudes(config);
  const auto& f = data.primary();
  const auto grid = gauss_legendre_sphere(io::effective_grid_degree(config, f.l_max(), err));
  const auto R = config.R.empty() ? default_schedule() : config.R;
  const auto profile = flux_profile(f, data.channels, R, grid, config.threads);
  const double tol = config.tolerances.conservation;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const double sigma = profile.sigma_sum;
    const double d = sigma == 0.0 ? std::abs(profile.total[i]) : std::abs(profile.total[i] - sigma) / sigma;
    report.add("conservation", at_R(R[i]), d, tol, d < tol);
  }
}

PartialWaveAmplitude truncated(const PartialWaveAmplitude& f, int l_max) {
  PartialWaveAmplitude out(f.channel_count(), f.entrance(), f.incident());
  for (std::size_t b = 0; b < f.channel_count(); ++b)
    for (const auto& [key, value] : f.modes(b))
      if (key.first <= l_max) out.set(b, key.first, key.second, value);
  return out;
}

void check_two_path(const io::RunConfig& config, Report& report, std::ostream& err) {
  std::size_t mismatches = 0;
  const auto rows = check_closed_form_series(8);
  for (const auto& row : rows)
    if (!row.agrees) {
      ++mismatches;
      err << "closed form differs: j=" << row.j << " l=" << row.l << " n=" << row.n
          << " extracted=" << to_string(row.extracted) << " closed=" << to_string(row.closed_form) << "\n";
    }
  report.add("two-path", "A_0..A_3 closed forms, j,l <= 8", static_cast<double>(mismatches), 0.5, mismatches == 0);

  const auto data = io::resolve_amplitudes(config);
  const auto& f = data.primary();
  // With l <= 2 every off-diagonal pair has l + j <= 3, where the order-4 operator form is complete.
  const auto low = truncated(f, 2);
  const auto grid = gauss_legendre_sphere(io::effective_grid_degree(config, f.l_max(), err));
  const auto Rs = config.R.empty() ? default_schedule() : config.R;
  const double tol = config.tolerances.two_path;
  for (double R : Rs) {
    double worst = 0.0;
    for (const auto& n : grid.nodes) worst = worse(worst, operator_form_discrepancy(low, data.channels, R, n));
    report.add("two-path", "operator form, l<=2, " + at_R(R), worst, tol, worst < tol);
  }
  if (f.l_max() > 2) {
    // Order-4 truncation error of the full amplitude decays as (kR)^-5.
    std::vector<double> xs, ys;
    const double k = data.channels.k(data.channels.entrance());
    for (double kR : {20.0, 40.0, 80.0, 160.0}) {
      double worst = 0.0;
      for (const auto& n : grid.nodes) {
        const double R = kR / k;
        worst = worse(worst, std::abs(differential_flux_exact(f, data.channels, R, n) -
                                         differential_flux_asymptotic(f, data.channels, R, n, 4)));
      }
      if (worst > 0.0) {
        xs.push_back(std::log(kR));
        ys.push_back(std::log(worst));
      }
    }
    if (xs.size() >= 2) {
      const double slope = (ys.back() - ys.front()) / (xs.back() - xs.front());
      report.info("two-path", "order-4 truncation error slope over kR in [20, 160]: " + sci(slope));
    }
  }
}

void write_report(const Report& report, io::OutputFormat format, std::ostream& out) {
  if (format == io::OutputFormat::json) {
    out << io::dump({{"pass", report.pass}, {"results", report.lines}});
    return;
  }
  for (const auto& line : report.lines) {
    if (line.contains("info")) {
      out << line["check"].get<std::string>() << ": " << line["info"].get<std::string>() << '\n';
      continue;
    }
    out << line["check"].get<std::string>() << " [" << line["case"].get<std::string>()
        << "] defect=" << sci(line["defect"].get<double>()) << " tol=" << sci(line["tolerance"].get<double>())
        << (line["pass"].get<bool>() ? " PASS" : " FAIL") << '\n';
  }
  out << (report.pass ? "PASS" : "FAIL") << '\n';
}

int cmd_check(const Options& opt, const io::RunConfig& config, io::OutputFormat format, std::ostream& out,
              std::ostream& err) {
  Report report;
  if (opt.which == "greens") check_greens(config, report);
  else if (opt.which == "unitarity") check_unitarity(config, report, err);
  else if (opt.which == "optical") check_optical(config, report, err);
  else if (opt.which == "conservation") check_conservation(config, report, err);
  else check_two_path(config, report, err);
  write_report(report, format, out);
  return report.pass ? ok : check_failed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distance-dependent scattered flux from partial-wave amplitudes", "nearfield"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, "JSON run configuration");
    if (config_required) c->required();
    c->check(CLI::ExistingFile);
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", opt.out, "write results to this file");
  };
  auto* flux = app.add_subcommand("flux", "flux profile over the configured R schedule");
  add_common(flux, true);
  auto* coeffs = app.add_subcommand("coeffs", "exact Wronskian series coefficients A_n(l, j)");
  add_common(coeffs, false);
  coeffs->add_option("--l", opt.l, "orbital index l")->check(CLI::NonNegativeNumber);
  coeffs->add_option("--j", opt.j, "orbital index j")->check(CLI::NonNegativeNumber)->each([&](const std::string&) {
    opt.j_given = true;
  });
  coeffs->add_flag("--table", opt.table, "table for j = 0..l");
  auto* check = app.add_subcommand("check", "validate an identity and report PASS/FAIL");
  add_common(check, false);
  check->add_option("which", opt.which, "greens|unitarity|optical|conservation|two-path")
      ->required()
      ->check(CLI::IsMember({"greens", "unitarity", "optical", "conservation", "two-path"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  std::ofstream file;
  std::ostringstream buffer;
  try {
    std::optional<io::RunConfig> config;
    if (!opt.config.empty()) config = io::load_config(opt.config);
    const auto format = resolve_format(opt, config ? &*config : nullptr);
    int code = ok;
    if (flux->parsed()) cmd_flux(*config, format, buffer, err);
    else if (coeffs->parsed()) cmd_coeffs(opt, format, buffer);
    else {
      if (!config && opt.which != "greens") throw io::ConfigError("check " + opt.which + " needs --config");
      code = cmd_check(opt, config.value_or(io::RunConfig{}), format, buffer, err);
    }
    if (opt.out.empty()) {
      out << buffer.str();
    } else {
      file.open(opt.out);
      if (!file) throw io::ConfigError("cannot write " + opt.out);
      file << buffer.str();
    }
    return code;
  } catch (const io::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const io::DataError& e) {
    err << "data error: " << e.what() << '\n';
    return data_error;
  } catch (const std::invalid_argument& e) {
    err << "data error: " << e.what() << '\n';
    return data_error;
  } catch (const std::domain_error& e) {
    err << "data error: " << e.what() << '\n';
    return data_error;
  }
}

}  // namespace nearfield::cli
