// Command-line front end: fit models, run goodness-of-fit tests, select a
// model by AIC, or drive Monte Carlo scenario grids.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "paired_gof/bootstrap.hpp"
#include "paired_gof/estimation.hpp"
#include "paired_gof/gof.hpp"
#include "paired_gof/io.hpp"
#include "paired_gof/render.hpp"
#include "paired_gof/selection.hpp"
#include "paired_gof/simulation.hpp"

namespace {

using namespace paired_gof;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

FrequencyTable load_table(const std::string& path) {
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return parse_frequency_table(read_file(path), csv ? TableFormat::Csv
                                                    : TableFormat::Json);
}

std::vector<ModelKind> parse_models(const std::string& arg) {
  // "all" covers the five candidate models; "saturated" must be asked for.
  if (arg == "all")
    return {ModelKind::Independence, ModelKind::Rosner, ModelKind::Donner,
            ModelKind::Dallal, ModelKind::ClaytonCopula};
  std::vector<ModelKind> models;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto model = model_from_name(tok);
    if (!model) throw invalid_input("unknown model: " + tok);
    models.push_back(*model);
  }
  if (models.empty()) throw invalid_input("no model named");
  return models;
}

std::vector<GofMethod> parse_methods(const std::string& arg) {
  if (arg == "all") return {kAllMethods.begin(), kAllMethods.end()};
  std::vector<GofMethod> methods;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto method = method_from_name(tok);
    if (!method) throw invalid_input("unknown method: " + tok);
    methods.push_back(*method);
  }
  if (methods.empty()) throw invalid_input("no method named");
  return methods;
}

OutputFormat parse_format(const std::string& arg) {
  if (arg == "json") return OutputFormat::Json;
  if (arg == "table") return OutputFormat::Table;
  throw invalid_input("unknown output format: " + arg);
}

bool any_bootstrap(const std::vector<GofMethod>& methods) {
  for (const auto method : methods)
    if (is_bootstrap(method)) return true;
  return false;
}

struct CommonArgs {
  std::string input;
  std::string models = "all";
  std::string methods = "all";
  std::string format = "table";
  std::optional<std::uint64_t> seed;
  long n_boot = 2000;
  double tol = 1e-6;
  int max_iter = 500;
  double threshold = 0.05;
};

void add_fit_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--tol", args.tol, "convergence tolerance");
  cmd->add_option("--max-iter", args.max_iter, "maximum fit iterations");
  cmd->add_option("--format", args.format, "output format: json or table");
}

FitOptions fit_options(const CommonArgs& args) {
  FitOptions opts;
  opts.tol = args.tol;
  opts.max_iter = args.max_iter;
  return opts;
}

BootstrapOptions boot_options(const CommonArgs& args) {
  BootstrapOptions opts;
  opts.n_boot = args.n_boot;
  opts.seed = args.seed.value_or(0);
  return opts;
}

void require_seed(const CommonArgs& args, const std::vector<GofMethod>& methods) {
  if (any_bootstrap(methods) && !args.seed)
    throw invalid_input("--seed is required with bootstrap methods");
}

int run_fit(const CommonArgs& args) {
  const auto table = load_table(args.input);
  const auto models = parse_models(args.models);
  std::vector<FitResult> fits;
  for (const auto model : models) fits.push_back(fit(model, table, fit_options(args)));
  std::cout << render_fits(fits, table, parse_format(args.format));
  return 0;
}

int run_gof(const CommonArgs& args) {
  const auto table = load_table(args.input);
  const auto models = parse_models(args.models);
  const auto methods = parse_methods(args.methods);
  require_seed(args, methods);
  std::vector<GofRow> rows;
  for (const auto model : models) {
    GofRow row;
    row.model = model;
    const auto fitted = fit(model, table, fit_options(args));
    for (const auto method : methods)
      row.results.push_back(is_bootstrap(method)
                                ? bootstrap_gof(model, table, method,
                                                boot_options(args), fit_options(args))
                                : asymptotic_gof_for_fit(fitted, table, method));
    rows.push_back(std::move(row));
  }
  std::cout << render_gof(rows, parse_format(args.format));
  return 0;
}

int run_select(const CommonArgs& args) {
  const auto table = load_table(args.input);
  const auto models = parse_models(args.models);
  const auto methods = parse_methods(args.methods);
  require_seed(args, methods);
  SelectOptions opts;
  opts.threshold = args.threshold;
  opts.fit = fit_options(args);
  opts.boot = boot_options(args);
  const auto report = select_model(table, models, methods, opts);
  std::cout << render_selection(report, parse_format(args.format));
  return 0;
}

int run_simulate(const CommonArgs& args) {
  if (!args.seed) throw invalid_input("--seed is required for simulation");
  const auto configs = parse_scenario_grid(read_file(args.input));
  const auto reports = run_grid(configs, *args.seed);
  std::cout << render_rate_reports(reports, parse_format(args.format));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goodness-of-fit tools for combined unilateral and bilateral "
               "binary outcome data"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* fit_cmd = app.add_subcommand("fit", "maximum likelihood fits");
  fit_cmd->add_option("--input", args.input, "frequency table (json or csv)")
      ->required();
  fit_cmd->add_option("--model", args.models, "model list or 'all'");
  add_fit_flags(fit_cmd, args);

  auto* gof_cmd = app.add_subcommand("gof", "goodness-of-fit tests");
  gof_cmd->add_option("--input", args.input, "frequency table (json or csv)")
      ->required();
  gof_cmd->add_option("--model", args.models, "model list or 'all'");
  gof_cmd->add_option("--method", args.methods, "method list or 'all'");
  gof_cmd->add_option("--seed", args.seed, "bootstrap seed");
  gof_cmd->add_option("--n-boot", args.n_boot, "bootstrap replicates");
  add_fit_flags(gof_cmd, args);

  auto* select_cmd = app.add_subcommand("select", "AIC model selection");
  select_cmd->add_option("--input", args.input, "frequency table (json or csv)")
      ->required();
  select_cmd->add_option("--model", args.models, "candidate list or 'all'");
  select_cmd->add_option("--method", args.methods, "screening methods or 'all'");
  select_cmd->add_option("--seed", args.seed, "bootstrap seed");
  select_cmd->add_option("--n-boot", args.n_boot, "bootstrap replicates");
  select_cmd->add_option("--threshold", args.threshold, "GOF pass threshold");
  add_fit_flags(select_cmd, args);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo scenario grid");
  sim_cmd->add_option("--input", args.input, "scenario grid json")->required();
  sim_cmd->add_option("--seed", args.seed, "master seed");
  sim_cmd->add_option("--format", args.format, "output format: json or table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(args);
    if (gof_cmd->parsed()) return run_gof(args);
    if (select_cmd->parsed()) return run_select(args);
    if (sim_cmd->parsed()) return run_simulate(args);
  } catch (const paired_gof::invalid_input& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
