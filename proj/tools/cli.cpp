#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "cyslag/conifold.hpp"
#include "cyslag/cy_structure.hpp"
#include "cyslag/errors.hpp"
#include "cyslag/moment.hpp"
#include "cyslag/oracle.hpp"
#include "cyslag/potential.hpp"
#include "cyslag/slag.hpp"

namespace cyslag::cli {

namespace {

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + format_double(values[i]);
  return s;
}

// ---- verify -----------------------------------------------------------------------------

struct Suite {
  std::string name;
  double value;
  double threshold;
  bool upper;  // pass iff value <= threshold; otherwise pass iff value > threshold

  bool pass() const { return std::isfinite(value) && (upper ? value <= threshold : value > threshold); }
  nlohmann::json to_json() const {
    return {{"name", name},
            {"value", value},
            {"threshold", threshold},
            {"relation", upper ? "<=" : ">"},
            {"pass", pass()}};
  }
};

ComplexVector random_tangent(const ComplexVector& z, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  ComplexVector v = ComplexVector::Zero(z.size());
  for (const auto& b : holomorphic_tangent_basis(z)) v += Complex(normal(rng), normal(rng)) * b;
  return v;
}

std::vector<std::pair<Family, std::vector<double>>> leaf_cases(const RunConfig& cfg) {
  std::vector<Family> families;
  if (!cfg.family.empty()) {
    const auto f = parse_family(cfg.family);
    if (!f) throw ArgumentError("unknown family '" + cfg.family + "' (expected T2, SO3 or SOn)");
    families.push_back(*f);
  } else if (cfg.n == 3) {
    families = {Family::T2, Family::SO3, Family::SOn};
  } else {
    families = {Family::SOn};
  }
  std::vector<std::pair<Family, std::vector<double>>> cases;
  for (Family f : families) {
    if (!cfg.constants.empty() && !cfg.family.empty()) {
      cases.emplace_back(f, cfg.constants);
    } else if (f == Family::T2) {
      cases.emplace_back(f, std::vector<double>{0.1, -0.2, 0.3});
    } else if (f == Family::SO3) {
      cases.emplace_back(f, std::vector<double>{0.0, 0.0, 1.0});
    } else {
      std::vector<double> c(static_cast<std::size_t>(cfg.n), 0.0);
      c.back() = 0.5;
      cases.emplace_back(f, c);
    }
  }
  return cases;
}

}  // namespace

nlohmann::json verify_report(const RunConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw ArgumentError("--tol must be positive");
  if (cfg.samples == 0) throw ArgumentError("--samples must be positive");
  auto profile = std::make_shared<const PotentialProfile>(PotentialProfile::build(cfg.n, cfg.c));
  std::vector<Suite> suites;

  suites.push_back({"potential.ode_residual", profile->max_ode_residual(), 1e-8, true});
  if (cfg.n == 2 || cfg.n == 3) suites.push_back({"potential.closed_form_gap", profile->closed_form_gap(), 1e-9, true});

  {
    std::mt19937_64 rng(cfg.seed);
    double oracle = 0.0, antisym = 0.0, min_metric = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cfg.samples; ++k) {
      const QuadricPoint z = embed(random_cotangent_point(cfg.n, 5.0, rng));
      const TangentVector v(z, random_tangent(z.z(), rng));
      const TangentVector w(z, random_tangent(z.z(), rng));
      const double gv = std::sqrt(metric_st(*profile, v, v));
      const double gw = std::sqrt(metric_st(*profile, w, w));
      const double om = omega_st(*profile, v, w);
      oracle = std::max(oracle, std::abs(om - oracle_ddbar(*profile, v, w)) / (gv * gw));
      antisym = std::max(antisym, std::abs(om + omega_st(*profile, w, v)) / (gv * gw));
      min_metric = std::min(min_metric, metric_st(*profile, v, v) / v.v().squaredNorm());
    }
    suites.push_back({"kahler.oracle_agreement", oracle, 1e-5, true});
    suites.push_back({"kahler.antisymmetry", antisym, 1e-12, true});
    suites.push_back({"kahler.min_metric_eigen_ratio", min_metric, 0.0, false});
  }

  {
    std::mt19937_64 rng(cfg.seed + 1);
    std::vector<double> ratios;
    for (std::size_t k = 0; k < cfg.samples; ++k) {
      const QuadricPoint z = embed(random_cotangent_point(cfg.n, 5.0, rng));
      ratios.push_back(cy_ratio(*profile, z, metric_orthonormal_frame(*profile, z)));
    }
    double mean = 0.0, var = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    for (double r : ratios) var += (r - mean) * (r - mean);
    suites.push_back({"cy.ratio_cv", std::sqrt(var / static_cast<double>(ratios.size())) / mean, 1e-4, true});
  }

  {
    std::vector<PresetName> presets{PresetName::SOn_STAB};
    if (cfg.n == 3) {
      presets = {PresetName::SO4, PresetName::SO3_TILDE, PresetName::S1xSO3, PresetName::T2, PresetName::SO3_STAB,
                 PresetName::SOn_STAB};
    }
    std::mt19937_64 rng(cfg.seed + 2);
    for (PresetName name : presets) {
      const GroupPreset preset = make_preset(name, cfg.n);
      double worst = 0.0;
      for (std::size_t k = 0; k < cfg.samples; ++k) {
        const QuadricPoint z = embed(random_cotangent_point(cfg.n, 3.0, rng));
        worst = std::max(worst, moment_differential_check(*profile, preset, TangentVector(z, random_tangent(z.z(), rng))));
      }
      suites.push_back({"moment.hamiltonian." + std::string(preset_label(name)), worst, 1e-5, true});
    }
    if (cfg.n == 3) {
      for (PresetName name : {PresetName::SO4, PresetName::SO3_TILDE, PresetName::S1xSO3}) {
        const auto report = homogeneous_scan(*profile, name, 10000, cfg.seed);
        suites.push_back({"moment.homogeneous_scan." + std::string(preset_label(name)), report.min_scaled_norm, 1e-8,
                          false});
      }
    }
  }

  for (const auto& [family, constants] : leaf_cases(cfg)) {
    const LeafSpec spec = make_leaf_spec(family, constants, profile);
    const std::string prefix = "leaf." + std::string(family_label(family)) + ".";
    const ProfileCurve curve = trace_profile_curve(spec);
    if (curve.empty()) {
      suites.push_back({prefix + "nonempty", 0.0, 0.0, false});
      continue;
    }
    SampleOptions so;
    so.seed = cfg.seed;
    const SlagReport r = verify_special_lagrangian(*profile, sample_leaf(spec, curve, so));
    suites.push_back({prefix + "max_omega", r.max_omega, cfg.tol, true});
    suites.push_back({prefix + "max_im_omega", r.max_im_omega, cfg.tol, true});
    suites.push_back({prefix + "calibration_cv", r.calibration_cv, 1e-4, true});
    suites.push_back({prefix + "max_leaf_residual", r.max_leaf_residual, 1e-9, true});
  }

  if (cfg.n == 3) {
    for (ConeKind kind : {ConeKind::TORUS_A, ConeKind::TORUS_C, ConeKind::SPHERE}) {
      double om = 0.0, im = 0.0;
      const ConeSpec cone{kind, 1.0};
      for (int a = 0; a < 12; ++a) {
        for (int b = 0; b < 12; ++b) {
          const double a1 = 2.0 * M_PI * a / 12.0;
          const double a2 = kind == ConeKind::SPHERE ? -0.5 * M_PI + M_PI * (b + 0.5) / 12.0 : 2.0 * M_PI * b / 12.0;
          const ConePoint z(cone.point(a1, a2));
          const auto frame = cone.frame(a1, a2);
          for (std::size_t i = 0; i < frame.size(); ++i) {
            for (std::size_t j = i + 1; j < frame.size(); ++j) {
              const double s = std::sqrt(metric_cone(z, frame[i], frame[i]) * metric_cone(z, frame[j], frame[j]));
              om = std::max(om, std::abs(omega_cone(z, frame[i], frame[j])) / s);
            }
          }
          const Complex big = omega_big_cone(z, frame);
          im = std::max(im, std::abs(big.imag()) / std::abs(big));
        }
      }
      const std::string prefix = "cone." + std::string(cone_label(kind)) + ".";
      suites.push_back({prefix + "max_omega", om, 1e-9, true});
      suites.push_back({prefix + "max_im_omega", im, 1e-9, true});
    }
  }

  nlohmann::json report{{"command", "verify"}, {"version", kToolVersion}, {"n", cfg.n},
                        {"c", cfg.c},          {"seed", cfg.seed},        {"samples", cfg.samples},
                        {"tol", cfg.tol}};
  bool all = true;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : suites) {
    all = all && s.pass();
    list.push_back(s.to_json());
  }
  report["suites"] = list;
  report["pass"] = all;
  return report;
}

// ---- phase-portrait ----------------------------------------------------------------------

double phase_residual(const std::string& equation, double c, double t, double s) {
  if (equation == "T2_ZERO") return std::sin(2.0 * t) * std::sinh(2.0 * s) - c;
  if (equation == "SO3") return 2.0 * s - std::cos(2.0 * t) * std::sinh(2.0 * s) - c;
  throw ArgumentError("unknown equation '" + equation + "' (expected T2_ZERO or SO3)");
}

CsvTable phase_portrait(const std::string& equation, const std::vector<double>& levels, double rho_max,
                        std::vector<std::string>& notes) {
  phase_residual(equation, 0.0, 0.0, 0.0);
  if (!(rho_max > 0.0)) throw ArgumentError("--rho-max must be positive");
  CsvTable table;
  table.columns = {"c", "branch", "vertex", "t", "s", "residual"};
  TraceOptions opt;
  opt.rho_max = rho_max;
  opt.continuation.anchors = {{0, 0.25 * M_PI}, {0, 0.5 * M_PI}, {0, 0.75 * M_PI}};
  for (double c : levels) {
    std::vector<TracedBranch> branches;
    if (equation == "SO3") {
      branches = trace_plane_curves(So3CurveSystem(c, rho_max), opt);
    } else {
      branches = trace_plane_curves(T2ZeroCurveSystem(c, rho_max), opt);
    }
    if (branches.empty()) notes.push_back("empty contour for c = " + format_double(c));
    for (std::size_t b = 0; b < branches.size(); ++b) {
      for (std::size_t k = 0; k < branches[b].points.size(); ++k) {
        const RealVector& x = branches[b].points[k];
        table.rows.push_back({c, static_cast<double>(b), static_cast<double>(k), x[0], x[1],
                              std::abs(phase_residual(equation, c, x[0], x[1]))});
      }
    }
  }
  return table;
}

// ---- command plumbing ----------------------------------------------------------------------

namespace {

struct CommandFailure {
  int code;
  std::string message;
};

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.out.empty()) {
    out << content;
    return;
  }
  const std::filesystem::path path(cfg.out);
  if (path.has_parent_path() && !std::filesystem::is_directory(path.parent_path())) {
    throw CommandFailure{kIoError, "output directory does not exist: " + path.parent_path().string()};
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw CommandFailure{kIoError, "cannot open output file: " + cfg.out};
  file << content;
  if (!file) throw CommandFailure{kIoError, "write failed: " + cfg.out};
}

std::vector<std::pair<std::string, std::string>> common_header(const std::string& command, const RunConfig& cfg) {
  return {{"tool", "cyslag"},
          {"version", kToolVersion},
          {"command", command},
          {"n", std::to_string(cfg.n)},
          {"c", format_double(cfg.c)},
          {"seed", std::to_string(cfg.seed)}};
}

std::string csv_string(const CsvTable& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const nlohmann::json report = verify_report(cfg);
  emit(cfg, report.dump(2) + "\n", out);
  if (!report["pass"].get<bool>()) {
    for (const auto& s : report["suites"])
      if (!s["pass"].get<bool>()) err << "verify: failing invariant " << s["name"].get<std::string>() << "\n";
    return kVerificationFailure;
  }
  return kPass;
}

int cmd_phase_portrait(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<double> levels = cfg.constants.empty() ? std::vector<double>{-2, -1, -0.5, 0, 0.5, 1, 2}
                                                           : cfg.constants;
  std::vector<std::string> notes;
  CsvTable table = phase_portrait(cfg.equation, levels, cfg.rho_max, notes);
  table.header = common_header("phase-portrait", cfg);
  table.header.emplace_back("equation", cfg.equation);
  table.header.emplace_back("levels", join(levels));
  table.header.emplace_back("rho_max", format_double(cfg.rho_max));
  for (const auto& note : notes) {
    table.header.emplace_back("note", note);
    err << "phase-portrait: " << note << "\n";
  }
  emit(cfg, csv_string(table), out);
  return kPass;
}

Family require_family(const RunConfig& cfg) {
  if (cfg.family.empty()) throw ArgumentError("--family is required");
  const auto f = parse_family(cfg.family);
  if (!f) throw ArgumentError("unknown family '" + cfg.family + "' (expected T2, SO3 or SOn)");
  return *f;
}

int cmd_sample_leaf(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Family family = require_family(cfg);
  if (cfg.constants.empty()) throw ArgumentError("--constants is required");
  if (cfg.format != "csv" && cfg.format != "json") throw ArgumentError("--format must be csv or json");
  auto profile = std::make_shared<const PotentialProfile>(PotentialProfile::build(cfg.n, cfg.c));
  const LeafSpec spec = make_leaf_spec(family, cfg.constants, profile);
  TraceOptions topt;
  topt.rho_max = cfg.rho_max;
  topt.seed = cfg.seed;
  const ProfileCurve curve = trace_profile_curve(spec, topt);
  if (curve.empty()) {
    for (const auto& m : curve.messages) err << "sample-leaf: " << m << "\n";
    err << "sample-leaf: no leaf for constants " << join(cfg.constants) << "\n";
    return kEmptyResult;
  }
  SampleOptions so;
  so.curve_points = cfg.samples;
  so.seed = cfg.seed;
  const LeafSample sample = sample_leaf(spec, curve, so);
  const SlagReport r = verify_special_lagrangian(*profile, sample);
  if (r.max_im_omega > cfg.tol && !cfg.force) {
    err << "sample-leaf: max |Im Omega| / |Omega| = " << format_double(r.max_im_omega) << " exceeds --tol "
        << format_double(cfg.tol) << "; nothing written (use --force to override)\n";
    return kVerificationFailure;
  }

  CsvTable table = leaf_sample_table(sample);
  auto header = common_header("sample-leaf", cfg);
  header.emplace_back("family", std::string(family_label(family)));
  header.emplace_back("constants", join(cfg.constants));
  header.emplace_back("max_omega", format_double(r.max_omega));
  header.emplace_back("max_im_omega", format_double(r.max_im_omega));
  header.emplace_back("calibration_cv", format_double(r.calibration_cv));
  header.emplace_back("max_leaf_residual", format_double(r.max_leaf_residual));
  header.emplace_back("excluded_frames", std::to_string(sample.excluded_frames));
  for (const auto& m : curve.messages) header.emplace_back("note", m);

  if (cfg.format == "csv") {
    table.header = header;
    emit(cfg, csv_string(table), out);
  } else {
    nlohmann::json j;
    nlohmann::json h = nlohmann::json::object();
    for (const auto& [k, v] : header) {
      if (k == "note") {
        h["notes"].push_back(v);
      } else {
        h[k] = v;
      }
    }
    j["header"] = h;
    j["columns"] = table.columns;
    j["rows"] = table.rows;
    nlohmann::json points = nlohmann::json::array();
    for (const auto& s : sample.points) points.push_back(point_to_json(s.z.z()));
    j["points"] = points;
    emit(cfg, j.dump(2) + "\n", out);
  }
  return kPass;
}

int cmd_asymptotics(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Family family = require_family(cfg);
  if (cfg.constants.empty()) throw ArgumentError("--constants is required");
  auto profile = std::make_shared<const PotentialProfile>(PotentialProfile::build(cfg.n, cfg.c));
  const LeafSpec spec = make_leaf_spec(family, cfg.constants, profile);
  TraceOptions topt;
  topt.seed = cfg.seed;
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json notes = nlohmann::json::array();
  for (double rho : cfg.rho_values) {
    try {
      const AsymptoticReport a = asymptotic_distance(spec, rho, topt);
      rows.push_back({{"rho", a.rho},
                      {"t", a.t},
                      {"dist_to_cone", a.dist_to_cone},
                      {"t_deviation", a.t_deviation},
                      {"cone", std::string(cone_label(a.cone))}});
    } catch (const DomainError& e) {
      notes.push_back(e.what());
      err << "asymptotics: " << e.what() << "\n";
    }
  }
  nlohmann::json report{{"command", "asymptotics"},
                        {"version", kToolVersion},
                        {"n", cfg.n},
                        {"c", cfg.c},
                        {"family", std::string(family_label(family))},
                        {"constants", cfg.constants},
                        {"rows", rows},
                        {"notes", notes}};
  emit(cfg, report.dump(2) + "\n", out);
  return rows.empty() ? kEmptyResult : kPass;
}

int cmd_profile(const RunConfig& cfg, std::ostream& out) {
  const PotentialProfile profile = PotentialProfile::build(cfg.n, cfg.c);
  emit(cfg, profile.to_json().dump() + "\n", out);
  return kPass;
}

// Fills every key of the JSON config file whose flag was not given on the command line.
void apply_config(const std::string& path, RunConfig& cfg, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw CommandFailure{kIoError, "cannot read config file: " + path};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ArgumentError("config file must hold a JSON object");
  auto given = [&sub](const std::string& flag) {
    try {
      return sub.count("--" + flag) > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  try {
    for (const auto& [key, value] : j.items()) {
      const std::string flag = key == "rho_max" ? "rho-max" : key;
      if (given(flag)) continue;
      if (key == "n") cfg.n = value.get<int>();
      else if (key == "c") cfg.c = value.get<double>();
      else if (key == "family") cfg.family = value.get<std::string>();
      else if (key == "constants") cfg.constants = value.get<std::vector<double>>();
      else if (key == "tol") cfg.tol = value.get<double>();
      else if (key == "samples") cfg.samples = value.get<std::size_t>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "format") cfg.format = value.get<std::string>();
      else if (key == "force") cfg.force = value.get<bool>();
      else if (key == "equation") cfg.equation = value.get<std::string>();
      else if (key == "rho_max") cfg.rho_max = value.get<double>();
      else if (key == "rho") cfg.rho_values = value.get<std::vector<double>>();
      else throw ArgumentError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ArgumentError("config file " + path + ": " + e.what());
  }
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string config_path;
  CLI::App app{"Special Lagrangian leaves of the Stenzel metric on T*S^n", "cyslag"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "sphere dimension")->check(CLI::Range(2, 64));
    sub->add_option("--c", cfg.c, "Stenzel constant c > 0");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out, "output file (default: standard output)");
    sub->add_option("--config", config_path, "JSON file with the same keys; flags take precedence");
  };
  auto add_leaf = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family, "T2, SO3 or SOn");
    sub->add_option("--constants", cfg.constants, "comma-separated leaf constants")->delimiter(',');
  };

  CLI::App* verify = app.add_subcommand("verify", "run every invariant suite and report as JSON");
  add_common(verify);
  add_leaf(verify);
  verify->add_option("--tol", cfg.tol, "bound on the special Lagrangian statistics");
  verify->add_option("--samples", cfg.samples, "random samples per suite");

  CLI::App* portrait = app.add_subcommand("phase-portrait", "contours of the reduced profile equations as CSV");
  add_common(portrait);
  portrait->add_option("--equation", cfg.equation, "T2_ZERO or SO3");
  portrait->add_option("--constants", cfg.constants, "comma-separated contour levels")->delimiter(',');
  portrait->add_option("--rho-max", cfg.rho_max, "upper bound of s");

  CLI::App* sample = app.add_subcommand("sample-leaf", "trace, sample, verify and export one leaf");
  add_common(sample);
  add_leaf(sample);
  sample->add_option("--tol", cfg.tol, "refuse to write when max |Im Omega| / |Omega| exceeds this");
  sample->add_option("--samples", cfg.samples, "curve points per branch");
  sample->add_option("--format", cfg.format, "csv or json");
  sample->add_option("--rho-max", cfg.rho_max, "upper bound of rho");
  sample->add_flag("--force", cfg.force, "write even when the verification fails");

  CLI::App* asym = app.add_subcommand("asymptotics", "distance of a leaf to its limiting cone as JSON rows");
  add_common(asym);
  add_leaf(asym);
  asym->add_option("--rho", cfg.rho_values, "comma-separated rho values")->delimiter(',');

  CLI::App* profile = app.add_subcommand("profile", "dump the potential table {n, c, tau, w} as JSON");
  add_common(profile);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsageError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    if (!config_path.empty()) apply_config(config_path, cfg, *chosen);
    if (!(cfg.c > 0.0)) throw ArgumentError("--c must be positive");
    if (cfg.n < 2) throw ArgumentError("--n must be at least 2");
    if (!(cfg.tol > 0.0)) throw ArgumentError("--tol must be positive");
    if (chosen == verify) return cmd_verify(cfg, out, err);
    if (chosen == portrait) return cmd_phase_portrait(cfg, out, err);
    if (chosen == sample) return cmd_sample_leaf(cfg, out, err);
    if (chosen == asym) return cmd_asymptotics(cfg, out, err);
    return cmd_profile(cfg, out);
  } catch (const CommandFailure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailure;
  }
}

}  // namespace cyslag::cli
