#ifndef PAIRED_GOF_BOOTSTRAP_HPP
#define PAIRED_GOF_BOOTSTRAP_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "paired_gof/estimation.hpp"
#include "paired_gof/gof.hpp"
#include "paired_gof/models.hpp"
#include "paired_gof/rng.hpp"
#include "paired_gof/types.hpp"

namespace paired_gof {

struct BootstrapOptions {
  long n_boot = 2000;
  std::uint64_t seed = 0;
  int max_regen = 100;
  unsigned threads = 0;  // 0 = worker_threads()
};

/// Draws a table with the same per-group margins as `shape`, with bilateral
/// counts multinomial under the model's joint probabilities and unilateral
/// counts binomial under the marginals. `kappas` may give one nuisance value
/// per group; otherwise params.kappa applies to all groups.
inline FrequencyTable sample_table(const ParamVector& params, ModelKind model,
                                   const FrequencyTable& shape, RandomSource& rng,
                                   const std::vector<double>* kappas = nullptr) {
  FrequencyTable drawn;
  drawn.groups.reserve(shape.g());
  drawn.labels = shape.labels;
  for (std::size_t i = 0; i < shape.g(); ++i) {
    const auto& src = shape.groups[i];
    GroupCounts grp;
    if (src.m_plus() > 0) {
      JointProbs p;
      if (model == ModelKind::Saturated) {
        p = params.sat_probs[i];
      } else {
        const double kappa = kappas ? (*kappas)[i] : params.kappa.value_or(0.0);
        const double pi = params.pis[i];
        if (pi <= 0.0)
          p = {1, 0, 0};
        else if (pi >= 1.0)
          p = {0, 0, 1};
        else
          p = joint_probs(model, pi, kappa);
      }
      rng.multinomial3(src.m_plus(), p.p0, p.p1, grp.m0, grp.m1, grp.m2);
    }
    if (src.n_plus() > 0) {
      grp.n1 = rng.binomial(src.n_plus(), params.pis[i]);
      grp.n0 = src.n_plus() - grp.n1;
    }
    drawn.groups.push_back(grp);
  }
  return drawn;
}

/// Raises empty cells on populated sides of a table to one count (margins
/// grow accordingly). Replicates drawn from sparse fits routinely produce
/// empty cells whose refits degenerate and distort the ordering quantities;
/// smoothing stabilizes them while leaving dense tables untouched.
inline FrequencyTable smooth_zero_cells(const FrequencyTable& table,
                                        std::int64_t floor = 2) {
  FrequencyTable out = table;
  for (auto& grp : out.groups) {
    if (grp.m_plus() > 0) {
      if (grp.m0 == 0) grp.m0 = floor;
      if (grp.m1 == 0) grp.m1 = floor;
      if (grp.m2 == 0) grp.m2 = floor;
    }
    if (grp.n_plus() > 0) {
      if (grp.n0 == 0) grp.n0 = floor;
      if (grp.n1 == 0) grp.n1 = floor;
    }
  }
  return out;
}

namespace detail {

// The ordering quantity of one bootstrap method under a table's own refit:
// G2 for B1, X2 for B2, log table probability for B3.
inline double bootstrap_ordering(GofMethod method, const FitResult& fitted,
                                 const FrequencyTable& table) {
  switch (method) {
    case GofMethod::B1:
      return gof_statistic(GofMethod::G2, table, expected_counts(fitted, table));
    case GofMethod::B2:
      return gof_statistic(GofMethod::X2, table, expected_counts(fitted, table));
    case GofMethod::B3:
      return log_observed_table_probability(fitted, table);
    default:
      throw std::invalid_argument("bootstrap_ordering: asymptotic method");
  }
}

struct ReplicateTally {
  long extreme = 0;
  long ties = 0;
  long failed = 0;
};

}  // namespace detail

/// Parametric bootstrap test. Replicates are drawn under the observed fit,
/// refit, and compared to the observed ordering quantity with strict
/// inequalities (replicate G2/X2 greater, replicate probability smaller).
/// Failed refits are regenerated on fresh streams up to max_regen, then
/// excluded from numerator and denominator. Deterministic for a fixed seed
/// regardless of thread count.
inline GofResult bootstrap_gof(ModelKind model, const FrequencyTable& table,
                               GofMethod method, const BootstrapOptions& boot_opts,
                               const FitOptions& fit_opts = {}) {
  if (!is_bootstrap(method))
    throw std::invalid_argument("bootstrap_gof: asymptotic method");
  if (model == ModelKind::Saturated)
    throw std::invalid_argument("bootstrap_gof: saturated model");
  const auto observed_fit = fit(model, table, fit_opts);
  if (!observed_fit.converged) throw invalid_input("observed fit did not converge");
  const double observed_stat = detail::bootstrap_ordering(method, observed_fit, table);

  const long n_boot = boot_opts.n_boot;
  const unsigned n_threads = std::min<unsigned>(
      boot_opts.threads ? boot_opts.threads : worker_threads(),
      static_cast<unsigned>(n_boot));
  std::vector<detail::ReplicateTally> tallies(std::max(1u, n_threads));

  auto run_range = [&](long begin, long end, detail::ReplicateTally& tally) {
    for (long r = begin; r < end; ++r) {
      bool done = false;
      for (int attempt = 0; attempt <= boot_opts.max_regen && !done; ++attempt) {
        const std::uint64_t stream =
            (std::uint64_t(r) << 16) | std::uint64_t(attempt & 0xFFFF);
        RandomSource rng(boot_opts.seed, stream);
        const auto replicate =
            smooth_zero_cells(sample_table(observed_fit.params, model, table, rng));
        FitResult refit;
        try {
          refit = fit(model, replicate, fit_opts);
        } catch (const std::exception&) {
          continue;
        }
        if (!refit.converged) continue;
        double stat;
        try {
          stat = detail::bootstrap_ordering(method, refit, replicate);
        } catch (const std::exception&) {
          continue;
        }
        if (method == GofMethod::B3) {
          if (stat < observed_stat) ++tally.extreme;
        } else {
          if (stat > observed_stat) ++tally.extreme;
        }
        if (stat == observed_stat) ++tally.ties;
        done = true;
      }
      if (!done) ++tally.failed;
    }
  };

  if (n_threads <= 1) {
    run_range(0, n_boot, tallies[0]);
  } else {
    std::vector<std::thread> threads;
    const long chunk = (n_boot + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      const long begin = t * chunk;
      const long end = std::min<long>(n_boot, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(run_range, begin, end, std::ref(tallies[t]));
    }
    for (auto& th : threads) th.join();
  }

  detail::ReplicateTally total;
  for (const auto& tally : tallies) {
    total.extreme += tally.extreme;
    total.ties += tally.ties;
    total.failed += tally.failed;
  }
  const long effective = n_boot - total.failed;
  if (effective <= 0) throw invalid_input("no bootstrap replicate could be refit");

  GofResult result;
  result.method = method;
  result.statistic =
      method == GofMethod::B3 ? std::exp(observed_stat) : observed_stat;
  result.p_value = double(total.extreme) / double(effective);
  result.n_boot = effective;
  result.n_extreme = total.extreme;
  result.failed_replicates = total.failed;
  result.ties = total.ties;
  return result;
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_BOOTSTRAP_HPP
