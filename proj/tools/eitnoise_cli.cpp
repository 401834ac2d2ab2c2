// Command-line front end: spectrum, extrema, dgcz, validate.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eitnoise/eitnoise.hpp"
#include "eitnoise/io/output.hpp"
#include "eitnoise/io/scenario.hpp"

namespace fs = std::filesystem;
using namespace eitnoise;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
  std::string scenario;
  std::string out = ".";
  int threads = 1;
  bool dump_matrices = false;
  std::string command_line;
};

std::string channel_name(Channel c) { return c == Channel::Probe ? "probe" : "pump"; }

void dump_matrices(const FluctuationSystem& sys, const fs::path& dir, io::RunManifest& manifest) {
  io::matrix_csv(sys.drift).save(dir / "drift.csv");
  io::matrix_csv(sys.diffusion).save(dir / "diffusion.csv");
  manifest.outputs.push_back("drift.csv");
  manifest.outputs.push_back("diffusion.csv");
}

int run_spectrum(const CommonArgs& args) {
  const auto sc = io::load_scenario(args.scenario);
  const fs::path dir = io::prepare_output_dir(args.out);
  io::RunManifest manifest;
  manifest.scenario_hash = sc.hash;
  manifest.command = args.command_line;

  SpectrumRequest req;
  req.omegas = sc.grid.omegas();
  req.theta_probe = sc.theta_probe;
  req.theta_pump = sc.theta_pump;
  req.threads = args.threads;
  const auto result = evaluate_spectrum(sc.params, req, sc.steady_state, sc.linearization);

  io::CsvWriter csv({"omega", "y2_num", "y2_cf", "y1_num", "y1_cf", "c_num", "c_cf"});
  for (const auto& r : result.rows)
    csv.row({io::format_number(r.omega), io::format_number(r.probe_numeric), io::format_number(r.probe_closed_form),
             io::format_number(r.pump_numeric), io::format_number(r.pump_closed_form),
             io::format_number(r.correlation_numeric), io::format_number(r.correlation_closed_form)});
  csv.save(dir / "spectrum.csv");
  manifest.outputs.push_back("spectrum.csv");

  if (args.dump_matrices) {
    const auto s = solve_steady_state(sc.params, sc.steady_state);
    dump_matrices(build_fluctuation_system(sc.params, s, sc.linearization), dir, manifest);
  }
  manifest.save(dir / "manifest.json");

  if (const auto c = sc.params.cooperativity()) std::printf("cooperativity C = %.6g\n", *c);
  if (!result.closed_forms_applicable) std::printf("closed forms not applicable; numeric columns only\n");
  std::printf("wrote %zu rows to %s\n", result.rows.size(), (dir / "spectrum.csv").string().c_str());
  return kExitOk;
}

int run_extrema(const CommonArgs& args, const std::string& channel_arg) {
  const auto sc = io::load_scenario(args.scenario);
  const fs::path dir = io::prepare_output_dir(args.out);
  const Channel channel = channel_arg.empty() ? sc.extrema_channel : io::parse_channel(channel_arg, "--channel");
  const double theta = channel == Channel::Probe ? sc.theta_probe : sc.theta_pump;
  io::RunManifest manifest;
  manifest.scenario_hash = sc.hash;
  manifest.command = args.command_line;

  io::CsvWriter csv({"type", "kind", "omega", "value", "approx_omega", "approx_value", "omega_rel_dev", "value_rel_dev"});
  std::string summary;
  try {
    const auto report = find_extrema(sc.params, theta, channel, sc.extrema);
    char line[256];
    std::snprintf(line, sizeof line, "%zu extrema of the %s spectrum, theta = %.6g\n", report.extrema.size(),
                  channel_name(channel).c_str(), report.theta);
    summary += line;
    for (const auto& e : report.extrema) {
      const char* type = e.type == ExtremumType::Maximum ? "max" : "min";
      const char* kind = e.kind == ExtremumKind::Inner ? "inner" : "outer";
      csv.row({type, kind, io::format_number(e.omega), io::format_number(e.value), io::format_number(e.approx_omega),
               io::format_number(e.approx_value), io::format_number(e.omega_deviation),
               io::format_number(e.value_deviation)});
      std::snprintf(line, sizeof line, "  %s %s  omega = %+.6f  value = %.6f", type, kind, e.omega, e.value);
      summary += line;
      if (e.approx_omega) {
        std::snprintf(line, sizeof line, "  approx omega = %.6f (%.2f%%)  approx value = %.6f (%.2f%%)",
                      *e.approx_omega, 100.0 * *e.omega_deviation, *e.approx_value, 100.0 * *e.value_deviation);
        summary += line;
      }
      summary += '\n';
    }
  } catch (const NoExtrema&) {
    summary = "no extrema: the " + channel_name(channel) + " spectrum is flat or monotone on the range\n";
  }
  csv.save(dir / "extrema.csv");
  {
    std::ofstream f(dir / "extrema.txt", std::ios::binary);
    f << summary;
  }
  manifest.outputs = {"extrema.csv", "extrema.txt"};
  if (args.dump_matrices) {
    const auto s = solve_steady_state(sc.params, sc.steady_state);
    dump_matrices(build_fluctuation_system(sc.params, s, sc.linearization), dir, manifest);
  }
  manifest.save(dir / "manifest.json");
  std::cout << summary;
  return kExitOk;
}

int run_dgcz(const CommonArgs& args) {
  const json doc = io::read_json_file(args.scenario);
  DgczGrid grid = io::dgcz_grid_from_json(doc, args.scenario);
  grid.threads = args.threads;
  const fs::path dir = io::prepare_output_dir(args.out);
  const auto report = dgcz_scan(grid);

  io::CsvWriter csv({"cooperativity", "rabi_1", "rabi_2", "omega", "theta", "v_min"});
  for (const auto& m : report.cell_minima)
    csv.row({io::format_number(m.cooperativity), io::format_number(m.rabi_1), io::format_number(m.rabi_2),
             io::format_number(m.omega), io::format_number(m.theta), io::format_number(m.value)});
  csv.save(dir / "dgcz.csv");

  const auto& a = report.argmin;
  const json out = {
      {"grid",
       {{"cooperativity", grid.cooperativities}, {"rabi_1", grid.rabi_1}, {"rabi_2", grid.rabi_2},
        {"omega_count", grid.omegas.size()}, {"omega_min", grid.omegas.front()}, {"omega_max", grid.omegas.back()},
        {"kappa", grid.kappa}, {"squeeze_r2", grid.squeeze_r2}, {"theta_steps", grid.theta_steps}}},
      {"minimum", report.minimum},
      {"bound", report.bound},
      {"tolerance", report.tolerance},
      {"violation", report.violation},
      {"evaluations", report.evaluations},
      {"argmin",
       {{"cooperativity", a.cooperativity}, {"rabi_1", a.rabi_1}, {"rabi_2", a.rabi_2}, {"omega", a.omega},
        {"theta", a.theta}}}};
  {
    std::ofstream f(dir / "dgcz.json", std::ios::binary);
    if (!f) throw InputError("cannot write " + (dir / "dgcz.json").string());
    f << out.dump(2) << '\n';
  }
  io::RunManifest manifest;
  manifest.scenario_hash = io::scenario_hash(doc);
  manifest.command = args.command_line;
  manifest.outputs = {"dgcz.csv", "dgcz.json"};
  manifest.save(dir / "manifest.json");

  std::printf("min V = %.9g over %zu evaluations (bound %.1f), violation = %s\n", report.minimum, report.evaluations,
              report.bound, report.violation ? "true" : "false");
  std::printf("argmin: C = %.6g, rabi_1 = %.6g, rabi_2 = %.6g, omega = %.6g, theta = %.6g\n", a.cooperativity,
              a.rabi_1, a.rabi_2, a.omega, a.theta);
  return kExitOk;
}

int run_validate(const CommonArgs& args) {
  const auto sc = io::load_scenario(args.scenario);
  const auto report = validate_params(sc.params);
  std::printf("scenario %s (hash %s)\n", sc.name.c_str(), sc.hash.c_str());
  std::printf("parameters valid: %s\n", report.valid() ? "yes" : "no");
  if (const auto c = sc.params.cooperativity()) std::printf("cooperativity C = %.6g\n", *c);
  if (report.closed_forms_applicable) {
    std::printf("closed forms applicable\n");
  } else {
    std::printf("closed forms not applicable; numeric-only mode\n");
    for (const auto& n : report.closed_form_notes) std::printf("  note: %s\n", n.c_str());
  }

  const auto s = solve_steady_state(sc.params, sc.steady_state);
  const double residual = steady_state_residual(sc.params, s);
  std::printf("steady-state residual = %.3e (iterations %d)\n", residual, s.iterations);
  const auto sys = build_fluctuation_system(sc.params, s, sc.linearization);
  const auto stab = stability_check(sys);
  std::printf("stability: %s, max Re(lambda) = %.6e, soft modes = %zu\n", stab.stable ? "stable" : "unstable",
              stab.max_real, stab.soft_modes.size());

  json out = {{"hash", sc.hash},
              {"valid", report.valid()},
              {"closed_forms_applicable", report.closed_forms_applicable},
              {"closed_form_notes", report.closed_form_notes},
              {"steady_state_residual", residual},
              {"stable", stab.stable},
              {"max_real_eigenvalue", stab.max_real}};

  if (stab.stable) {
    const Matrix12 lyap = lyapunov_covariance(sys);
    const Matrix12 quad = covariance_by_quadrature(sys);
    const double rel = (quad - lyap).norm() / lyap.norm();
    std::printf("Lyapunov vs trapezoid (+-50, 20001 points) relative Frobenius error = %.3e\n", rel);
    out["lyapunov_quadrature_rel_error"] = rel;
  }

  if (report.closed_forms_applicable) {
    const std::vector<double> values{0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0};
    const std::vector<double> omegas{0.01, 0.02, 0.1, 0.5, 1.0, 5.0};
    std::printf("gamma_cross sweep (max relative deviation from closed forms):\n");
    json sweep = json::array();
    for (const auto& row : gamma_cross_sensitivity(sc.params, values, omegas, sc.theta_pump, sc.theta_probe)) {
      std::printf("  gamma_cross = %-6g probe %.3e  pump %.3e  correlation %.3e\n", row.gamma_cross,
                  row.probe_max_rel, row.pump_max_rel, row.correlation_max_rel);
      sweep.push_back({{"gamma_cross", row.gamma_cross}, {"probe", row.probe_max_rel}, {"pump", row.pump_max_rel},
                       {"correlation", row.correlation_max_rel}});
    }
    out["gamma_cross_sweep"] = sweep;
  }

  if (args.out != ".") {
    const fs::path dir = io::prepare_output_dir(args.out);
    io::RunManifest manifest;
    manifest.scenario_hash = sc.hash;
    manifest.command = args.command_line;
    std::ofstream(dir / "validate.json", std::ios::binary) << out.dump(2) << '\n';
    manifest.outputs = {"validate.json"};
    if (args.dump_matrices) dump_matrices(sys, dir, manifest);
    manifest.save(dir / "manifest.json");
  }
  return kExitOk;
}

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--scenario", args.scenario, "scenario or grid JSON file")->required();
  sub->add_option("--out", args.out, "output directory");
  sub->add_option("--threads", args.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--dump-matrices", args.dump_matrices, "write drift.csv and diffusion.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrature noise spectra of a two-mode cavity with Lambda atoms"};
  app.require_subcommand(1);
  CommonArgs args;
  std::string channel;
  for (int i = 0; i < argc; ++i) args.command_line += (i ? " " : "") + std::string(argv[i]);

  auto* spectrum = app.add_subcommand("spectrum", "noise spectra on the scenario grid");
  auto* extrema = app.add_subcommand("extrema", "spectrum extrema and their approximations");
  auto* dgcz = app.add_subcommand("dgcz", "separability scan over a parameter grid");
  auto* validate = app.add_subcommand("validate", "parameter, steady-state and stability report");
  for (auto* sub : {spectrum, extrema, dgcz, validate}) add_common(sub, args);
  extrema->add_option("--channel", channel, "probe or pump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  const std::string op = app.get_subcommands().front()->get_name();
  try {
    if (op == "spectrum") return run_spectrum(args);
    if (op == "extrema") return run_extrema(args, channel);
    if (op == "dgcz") return run_dgcz(args);
    return run_validate(args);
  } catch (const InputError& e) {
    std::fprintf(stderr, "%s: input error: %s\n", op.c_str(), e.what());
    return kExitInput;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "%s: numeric failure: %s\n", op.c_str(), e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: failure: %s\n", op.c_str(), e.what());
    return kExitNumeric;
  }
}
