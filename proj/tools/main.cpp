#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgdlab/acceptance.hpp"
#include "sgdlab/cli.hpp"
#include "sgdlab/dynamics.hpp"
#include "sgdlab/gibbs.hpp"
#include "sgdlab/morse.hpp"
#include "sgdlab/objective.hpp"
#include "sgdlab/pde.hpp"
#include "sgdlab/spectral.hpp"

namespace {

using namespace sgdlab;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cli::ConfigError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

struct RunContext {
  std::string config_path;
  std::uint64_t seed = 42;
  std::string out_dir = ".";

  nlohmann::json report;
  std::vector<std::string> artifacts;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void emit(const std::string& name, const std::string& content) {
    const std::string path = out_dir + "/" + name;
    write_file(path, content);
    artifacts.push_back(path);
  }
  void finish(const std::string& subcommand, const cli::Config* cfg) {
    report["subcommand"] = subcommand;
    report["seed"] = seed;
    if (cfg) report["config"] = cfg->serialize();
    report["artifacts"] = artifacts;
    report["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file(out_dir + "/run_report.json", report.dump(2));
  }
};

Point parse_point(const std::string& text, int dim) {
  std::istringstream in(text);
  Point p{0, 0};
  std::string item;
  for (int i = 0; i < dim; ++i) {
    if (!std::getline(in, item, ',')) throw cli::ConfigError("x0 needs " + std::to_string(dim) + " coordinates");
    p[i] = std::stod(item);
  }
  return p;
}

int cmd_simulate(RunContext& ctx) {
  const auto cfg = cli::Config::parse(
      read_file(ctx.config_path), {"field", "method", "s", "k_max", "x0", "replicas"});
  const ScalarField field = objective::catalog(cfg.get("field"));
  const std::string method_name = cfg.get_or("method", "sgd");
  dynamics::Method method = dynamics::Method::sgd;
  if (method_name == "gd") method = dynamics::Method::gd;
  else if (method_name == "sgld") method = dynamics::Method::sgld;
  else if (method_name != "sgd") throw cli::ConfigError("unknown method " + method_name);

  const double f_star = objective::global_minimum(field).value;
  const auto stats = dynamics::run_ensemble(
      method, field, cfg.get_num("s"),
      static_cast<std::uint64_t>(cfg.get_num("k_max")),
      parse_point(cfg.get("x0"), field.dimension),
      static_cast<int>(cfg.get_num_or("replicas", 100)), ctx.seed, f_star);
  ctx.emit("simulate.csv", cli::ensemble_csv(stats));
  ctx.report["f_star"] = f_star;
  ctx.finish("simulate", &cfg);
  return 0;
}

int cmd_spectrum(RunContext& ctx) {
  const auto cfg =
      cli::Config::parse(read_file(ctx.config_path), {"field", "s", "nodes", "k"});
  const ScalarField field = objective::catalog(cfg.get("field"));
  const double s = cfg.get_num("s");
  const spectral::GridPolicy policy{
      static_cast<std::size_t>(cfg.get_num_or("nodes", field.dimension == 1 ? 1500 : 301)),
      2.0};
  const GridSpec grid = spectral::certified_box(field, s, policy);
  const auto spectrum = spectral::smallest_eigs(
      spectral::assemble_witten(field, s, grid),
      static_cast<int>(cfg.get_num_or("k", 3)), false);
  ctx.emit("spectrum.json", cli::spectrum_json(spectrum, grid));
  ctx.finish("spectrum", &cfg);
  return 0;
}

int cmd_morse(RunContext& ctx) {
  const auto cfg =
      cli::Config::parse(read_file(ctx.config_path), {"field", "radius", "nodes"});
  const ScalarField field = objective::catalog(cfg.get("field"));
  const double R = cfg.get_num_or("radius", 3.0);
  const auto n = static_cast<std::size_t>(
      cfg.get_num_or("nodes", field.dimension == 1 ? 2001 : 201));
  const GridSpec grid = field.dimension == 1 ? GridSpec::line(-R, R, n)
                                             : GridSpec::box(-R, R, -R, R, n, n);
  const auto report =
      morse::labeling(field, morse::find_critical_points(field, grid), grid);
  ctx.emit("morse.json", morse::to_json(report));
  ctx.finish("morse", &cfg);
  return 0;
}

int cmd_fp(RunContext& ctx) {
  const auto cfg = cli::Config::parse(read_file(ctx.config_path),
                                      {"field", "s", "nodes", "T", "warm_s"});
  const ScalarField field = objective::catalog(cfg.get("field"));
  if (field.dimension != 1) throw cli::ConfigError("fp subcommand drives 1D studies");
  const double s = cfg.get_num("s");
  const double warm_s = cfg.get_num_or("warm_s", 1.5 * s);
  const auto nodes = static_cast<std::size_t>(cfg.get_num_or("nodes", 800));
  const GridSpec grid = gibbs::default_box(field, std::max(s, warm_s), nodes);

  const auto sp = spectral::smallest_eigs(
      spectral::assemble_witten(field, s, spectral::certified_box(field, s, {1500, 2.0})),
      3, false);
  const GridMeasure warm = gibbs::gibbs_on_grid(field, warm_s, grid);
  std::vector<double> rho0(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) rho0[i] = warm.density(i);
  const double h = grid.spacing(0);
  const auto fit = pde::decay_fit(field, s, rho0, grid, 0.4 * h * h / s,
                                  cfg.get_num_or("T", 40.0), sp.lambda_s);
  ctx.emit("decay.json", cli::decay_json(fit, s));
  ctx.emit("gibbs.csv", cli::measure_csv(gibbs::gibbs_on_grid(field, s, grid)));
  ctx.finish("fp", &cfg);
  return 0;
}

int cmd_decay_study(RunContext& ctx) {
  const auto cfg = cli::Config::parse(read_file(ctx.config_path),
                                      {"a", "c", "delta", "s_high", "s_low"});
  const double a = cfg.get_num_or("a", 1.0);
  const double c = cfg.get_num_or("c", 0.1);
  const double delta = cfg.get_num_or("delta", 0.1);
  const double s_high = cfg.get_num_or("s_high", 0.1);
  const double s_low = cfg.get_num_or("s_low", 0.001);
  nlohmann::json j;
  j["log10_k_high"] = cli::log10_threshold_step(a, 100 - s_high, c, s_high, delta);
  j["log10_k_low"] = cli::log10_threshold_step(a, 100 - s_low, c, s_low, delta);
  j["log10_ratio"] =
      j["log10_k_low"].get<double>() - j["log10_k_high"].get<double>();
  ctx.emit("decay_study.json", j.dump(2));
  ctx.finish("decay-study", &cfg);
  return 0;
}

int cmd_verify(RunContext& ctx, const std::string& suite) {
  const auto report = acceptance::run_suite(suite, ctx.seed);
  for (const auto& r : report.results)
    std::cout << "criterion " << r.id << " [" << r.name << "]: "
              << (r.pass ? "PASS" : "FAIL")
              << (r.detail.empty() ? "" : "  (" + r.detail + ")") << "\n";
  ctx.emit("verify_report.json", acceptance::report_json(report));
  ctx.finish("verify", nullptr);
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learning-rate dynamics laboratory"};
  app.require_subcommand(1);

  RunContext ctx;
  app.add_option("--seed", ctx.seed, "top-level seed");
  app.add_option("--out", ctx.out_dir, "output directory");

  std::string suite = "fast";
  auto* simulate = app.add_subcommand("simulate", "ensemble optimizer runs");
  auto* spectrum = app.add_subcommand("spectrum", "low spectrum and decay constant");
  auto* morse_cmd = app.add_subcommand("morse", "landscape analysis");
  auto* fp = app.add_subcommand("fp", "density evolution and decay fit");
  auto* decay = app.add_subcommand("decay-study", "learning-rate decay arithmetic");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  for (auto* sub : {simulate, spectrum, morse_cmd, fp, decay})
    sub->add_option("--config", ctx.config_path, "key=value config file")->required();
  verify->add_option("--suite", suite, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (simulate->parsed()) return cmd_simulate(ctx);
    if (spectrum->parsed()) return cmd_spectrum(ctx);
    if (morse_cmd->parsed()) return cmd_morse(ctx);
    if (fp->parsed()) return cmd_fp(ctx);
    if (decay->parsed()) return cmd_decay_study(ctx);
    if (verify->parsed()) return cmd_verify(ctx, suite);
  } catch (const cli::ConfigError& ex) {
    std::cerr << "configuration error: " << ex.what() << "\n";
    return 2;
  } catch (const objective::CatalogError& ex) {
    std::cerr << "configuration error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}
