#ifndef PAIRED_GOF_SIMULATION_HPP
#define PAIRED_GOF_SIMULATION_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "paired_gof/bootstrap.hpp"
#include "paired_gof/estimation.hpp"
#include "paired_gof/gof.hpp"
#include "paired_gof/models.hpp"
#include "paired_gof/rng.hpp"

namespace paired_gof {

/// One Monte Carlo cell: generator model and parameters, sample sizes,
/// methods to evaluate, and replication counts. A scalar kappa gives a
/// null-hypothesis run; per-group kappas give an alternative-hypothesis
/// (power) run against the single-kappa fitted model.
struct ScenarioConfig {
  ModelKind model = ModelKind::Rosner;
  std::vector<double> pis;
  std::vector<double> kappas;  // size 1 (common) or size g (per group)
  std::int64_t m_plus = 25;
  std::int64_t n_plus = 25;
  double alpha = 0.05;
  long n_rep = 10000;
  BootstrapOptions boot;
  std::vector<GofMethod> methods = {GofMethod::G2};
  std::optional<ModelKind> fitted_model;  // defaults to `model`
  std::string label;

  std::size_t g() const { return pis.size(); }
  void check() const {
    if (pis.empty()) throw invalid_input("scenario: empty pi vector");
    if (kappas.size() != 1 && kappas.size() != pis.size())
      throw invalid_input("scenario: kappa count must be 1 or g");
    if (!(alpha > 0 && alpha < 1)) throw invalid_input("scenario: alpha outside (0,1)");
    if (n_rep < 1) throw invalid_input("scenario: n_rep must be >= 1");
    for (std::size_t i = 0; i < pis.size(); ++i) {
      const double k = kappas.size() == 1 ? kappas[0] : kappas[i];
      joint_probs(model, pis[i], k);  // throws when inadmissible
    }
  }
};

enum class RateClass { Liberal, Conservative, Robust };

inline const char* rate_class_name(RateClass c) {
  switch (c) {
    case RateClass::Liberal: return "liberal";
    case RateClass::Conservative: return "conservative";
    case RateClass::Robust: return "robust";
  }
  return "?";
}

/// Liberal when rate/alpha > 1.2, conservative when < 0.8, robust between
/// (boundary ratios inclusive, with slack for division rounding).
inline RateClass classify_rate(double rate, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw std::domain_error("alpha outside (0,1)");
  const double ratio = rate / alpha;
  constexpr double slack = 1e-9;
  if (ratio > 1.2 * (1.0 + slack)) return RateClass::Liberal;
  if (ratio < 0.8 * (1.0 - slack)) return RateClass::Conservative;
  return RateClass::Robust;
}

struct MethodRate {
  GofMethod method = GofMethod::G2;
  double rate = 0.0;
  double std_error = 0.0;
  RateClass classification = RateClass::Robust;
  long rejections = 0;
};

struct RateReport {
  std::string label;
  long n_rep = 0;
  long failed_replicates = 0;
  std::vector<MethodRate> rates;
};

/// Runs one Monte Carlo cell: generates n_rep tables under the scenario's
/// generator, applies each requested method fitting `fitted_model`, and
/// reports per-method rejection rates at level alpha.
inline RateReport run_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.check();
  const auto g = config.g();
  const ModelKind fit_model = config.fitted_model.value_or(config.model);

  FrequencyTable shape;
  for (std::size_t i = 0; i < g; ++i) {
    GroupCounts grp;
    // Only the margins matter for sampling; put mass anywhere.
    grp.m0 = config.m_plus;
    grp.n0 = config.n_plus;
    shape.groups.push_back(grp);
  }
  ParamVector gen_params;
  gen_params.pis = config.pis;
  std::vector<double> kappas(g, config.kappas[0]);
  if (config.kappas.size() == g) kappas = config.kappas;
  gen_params.kappa = kappas[0];

  const std::size_t n_methods = config.methods.size();
  struct Tally {
    std::vector<long> rejections;
    long failed = 0;
  };
  const unsigned n_threads =
      std::min<unsigned>(worker_threads(), static_cast<unsigned>(config.n_rep));
  std::vector<Tally> tallies(std::max(1u, n_threads), Tally{std::vector<long>(n_methods, 0), 0});

  auto run_range = [&](long begin, long end, Tally& tally) {
    for (long rep = begin; rep < end; ++rep) {
      // Generation stream namespace is disjoint from bootstrap streams.
      RandomSource rng(seed ^ 0x5AF3C0DE5AF3C0DEULL, std::uint64_t(rep));
      // Simulated tables get a zero-cell floor of one before fitting; the
      // heavier floor used for bootstrap replicates is not needed here.
      // Copula draws are left as sampled: their fits stay stable on sparse
      // tables and flooring biases the rejection rate downward.
      auto table = sample_table(gen_params, config.model, shape, rng, &kappas);
      if (config.model != ModelKind::ClaytonCopula)
        table = smooth_zero_cells(table, 1);
      FitResult fitted;
      bool fit_ok = true;
      try {
        fitted = fit(fit_model, table);
        fit_ok = fitted.converged;
      } catch (const std::exception&) {
        fit_ok = false;
      }
      if (!fit_ok) {
        ++tally.failed;
        continue;
      }
      for (std::size_t mi = 0; mi < n_methods; ++mi) {
        const GofMethod method = config.methods[mi];
        try {
          double p;
          if (is_bootstrap(method)) {
            BootstrapOptions boot = config.boot;
            boot.seed = derive_stream(seed, 0xB007'0000ULL + std::uint64_t(rep));
            boot.threads = 1;  // outer replicates already run in parallel
            p = bootstrap_gof(fit_model, table, method, boot).p_value;
          } else {
            p = asymptotic_gof_for_fit(fitted, table, method).p_value;
          }
          if (p < config.alpha) ++tally.rejections[mi];
        } catch (const std::exception&) {
          // Degenerate replicate for this method only; count as non-rejection.
        }
      }
    }
  };

  if (n_threads <= 1) {
    run_range(0, config.n_rep, tallies[0]);
  } else {
    std::vector<std::thread> threads;
    const long chunk = (config.n_rep + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      const long begin = t * chunk;
      const long end = std::min<long>(config.n_rep, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(run_range, begin, end, std::ref(tallies[t]));
    }
    for (auto& th : threads) th.join();
  }

  RateReport report;
  report.label = config.label;
  long failed = 0;
  std::vector<long> rejections(n_methods, 0);
  for (const auto& tally : tallies) {
    failed += tally.failed;
    for (std::size_t mi = 0; mi < n_methods; ++mi) rejections[mi] += tally.rejections[mi];
  }
  const long effective = config.n_rep - failed;
  report.n_rep = effective;
  report.failed_replicates = failed;
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    MethodRate mr;
    mr.method = config.methods[mi];
    mr.rejections = rejections[mi];
    mr.rate = effective > 0 ? double(rejections[mi]) / double(effective) : 0.0;
    mr.std_error =
        effective > 0 ? std::sqrt(mr.rate * (1.0 - mr.rate) / double(effective)) : 0.0;
    mr.classification = classify_rate(mr.rate, config.alpha);
    report.rates.push_back(mr);
  }
  return report;
}

/// Maps run_scenario over a grid with per-config derived seeds.
inline std::vector<RateReport> run_grid(const std::vector<ScenarioConfig>& configs,
                                        std::uint64_t seed) {
  std::vector<RateReport> reports;
  reports.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i)
    reports.push_back(run_scenario(configs[i], derive_stream(seed, i)));
  return reports;
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_SIMULATION_HPP
