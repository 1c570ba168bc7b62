// utail: finite-sample tail bounds for heavy-tailed U-statistics.
//
// Subcommands: catalog (list kernels/models), check (assumption report),
// bound / tail / ldp-scan (single pipeline stages), run (full pipeline).
// Exit codes: 0 success, 2 config error, 3 runtime error, 4 validity
// assertion failure (only with --assert).

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "utail/errors.hpp"
#include "utail/experiment.hpp"
#include "utail/ldp.hpp"
#include "utail/special.hpp"
#include "utail/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* c = cmd->add_option("--config", args.config_path,
                            "experiment config file");
  if (config_required) c->required();
  cmd->add_option("--out-dir", args.out_dir,
                  "output directory (overrides outputs.dir)");
  cmd->add_option("--seed", args.seed,
                  "master seed (overrides UTAIL_SEED and the config)");
  cmd->add_option("--threads", args.threads, "worker threads")
      ->check(CLI::Range(1, 1024));
}

int run_stages(const CommonArgs& args, std::vector<std::string> stages,
               bool assert_properties) {
  utail::ExperimentConfig cfg = utail::parse_config_file(args.config_path);
  utail::RunOptions opt;
  opt.out_dir = args.out_dir;
  opt.seed = args.seed;
  opt.threads = args.threads;
  opt.assert_properties = assert_properties;
  opt.log = &std::cout;
  opt.stages = std::move(stages);
  utail::RunReport rep = utail::run_experiment(cfg, opt);
  if (rep.exit_code == 3)
    std::cerr << "error: stage " << rep.failed_stage << " failed: "
              << rep.error << "\n";
  if (rep.exit_code == 4)
    std::cerr << "error: " << rep.assert_violations.size()
              << " validity assertion violation(s); see the manifest\n";
  return rep.exit_code;
}

int print_catalog() {
  std::cout << "utail " << utail::version_string << " (models "
            << utail::model_catalog_version << ", kernels "
            << utail::kernel_catalog_version << ")\n\nkernels:\n";
  for (const auto& e : utail::kernel_catalog())
    std::cout << "  " << e.pattern << "\n      " << e.description << "\n";
  std::cout << "\nmodels:\n";
  for (const auto& e : utail::model_catalog())
    std::cout << "  " << e.pattern << "\n      " << e.description << "\n";
  std::cout << "\nv modes: auto | subweibull_cap | polynomial_cap | "
               "mc_estimate | fixed{value}\n";
  return 0;
}

int print_check(const std::string& kernel_token,
                const std::string& model_token, std::size_t n, double t) {
  utail::DistributionModel model =
      utail::DistributionModel::parse(model_token);
  utail::KernelSpec kernel = utail::KernelSpec::parse(kernel_token);
  utail::CenteringResult centering = utail::centering_constant(kernel, model);
  kernel = kernel.with_centering(centering.value);
  std::cout << "kernel " << kernel.token() << " on " << model.token()
            << ", centering " << utail::to_shortest_string(centering.value)
            << ", n = " << n << ", t = " << utail::to_shortest_string(t)
            << "\n";
  utail::AssumptionReport rep =
      utail::check_assumptions(kernel, model, n, t);
  for (const auto& c : rep.checks)
    std::cout << "  [" << (c.ok ? "ok" : "NO") << "] " << c.name << ": "
              << c.evidence << "\n";
  std::cout << (rep.all_ok() ? "all checks passed"
                             : "some checks did not pass (diagnostic only)")
            << "\n";
  return 0;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const utail::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == utail::errc::config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "finite-sample exponential tail bounds for heavy-tailed U-statistics"};
  app.set_version_flag("--version", utail::version_string);
  app.require_subcommand(1);

  CLI::App* catalog = app.add_subcommand(
      "catalog", "list available kernels, models, and v modes");

  CommonArgs check_args;
  std::string check_kernel, check_model;
  std::size_t check_n = 100;
  double check_t = 1.0;
  CLI::App* check = app.add_subcommand(
      "check", "print the modelling-assumption report for a config or a "
               "kernel/model pair");
  check->add_option("--config", check_args.config_path,
                    "read kernel/model/n/t from this config");
  check->add_option("--kernel", check_kernel, "kernel token, e.g. maxabs{2}");
  check->add_option("--model", check_model,
                    "model token, e.g. weibull{scale=1,shape=0.5}");
  check->add_option("--n", check_n, "sample size for the zone checks")
      ->check(CLI::PositiveNumber);
  check->add_option("--t", check_t, "deviation for the zone checks")
      ->check(CLI::PositiveNumber);

  CommonArgs bound_args, tail_args, ldp_args, run_args;
  bool run_assert = false;
  CLI::App* bound = app.add_subcommand(
      "bound", "evaluate the upper bound over the config grid");
  add_common(bound, bound_args, true);
  CLI::App* tail = app.add_subcommand(
      "tail", "Monte Carlo tail estimation over the config grid");
  add_common(tail, tail_args, true);
  CLI::App* ldp = app.add_subcommand(
      "ldp-scan", "-log P / I ratio scan across the config n values");
  add_common(ldp, ldp_args, true);
  CLI::App* run = app.add_subcommand(
      "run", "full pipeline: check, bound, tail, ldp-scan, manifest");
  add_common(run, run_args, true);
  run->add_flag("--assert", run_assert,
                "exit 4 when the bound fails against the Monte Carlo "
                "confidence limits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (catalog->parsed()) return guarded(print_catalog);
  if (check->parsed())
    return guarded([&] {
      if (!check_args.config_path.empty()) {
        utail::ExperimentConfig cfg =
            utail::parse_config_file(check_args.config_path);
        std::size_t n = static_cast<std::size_t>(*std::max_element(
            cfg.n_values.begin(), cfg.n_values.end()));
        return print_check(cfg.kernel_token, cfg.model_token, n,
                           cfg.t_grid.back());
      }
      if (check_kernel.empty() || check_model.empty())
        utail::throw_config(
            "check needs --config, or both --kernel and --model");
      return print_check(check_kernel, check_model, check_n, check_t);
    });
  if (bound->parsed())
    return guarded([&] { return run_stages(bound_args, {"bound"}, false); });
  if (tail->parsed())
    return guarded([&] { return run_stages(tail_args, {"tail"}, false); });
  if (ldp->parsed())
    return guarded([&] { return run_stages(ldp_args, {"ldp_scan"}, false); });
  if (run->parsed())
    return guarded([&] { return run_stages(run_args, {}, run_assert); });
  return 2;
}
