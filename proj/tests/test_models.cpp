#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "paired_gof/models.hpp"

using namespace paired_gof;
using Catch::Approx;

namespace {

// Draws an admissible (pi, kappa) pair for the model.
std::pair<double, double> random_point(ModelKind model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.05, 0.95);
  for (;;) {
    const double pi = u01(rng);
    if (!has_nuisance(model)) return {pi, 0.0};
    const auto domain = nuisance_domain(model, {pi});
    const double lo = std::max(domain.lo, -5.0);
    const double hi = std::min(domain.hi, 5.0);
    if (!(hi > lo)) continue;
    const double span = hi - lo;
    std::uniform_real_distribution<double> uk(lo + 0.05 * span, hi - 0.05 * span);
    const double kappa = uk(rng);
    const auto p = joint_probs(model, pi, kappa);
    if (p.p0 > 1e-6 && p.p1 > 1e-6 && p.p2 > 1e-6) return {pi, kappa};
  }
}

}  // namespace

TEST_CASE("independence probabilities") {
  const auto p = joint_probs(ModelKind::Independence, 0.4, 0.0);
  CHECK(p.p0 == Approx(0.36));
  CHECK(p.p1 == Approx(0.48));
  CHECK(p.p2 == Approx(0.16));
}

TEST_CASE("constant-ratio model probabilities") {
  const auto p = joint_probs(ModelKind::Rosner, 0.4, 1.5);
  CHECK(p.p0 == Approx(1 - 0.8 + 1.5 * 0.16));
  CHECK(p.p1 == Approx(2 * 0.4 * (1 - 1.5 * 0.4)));
  CHECK(p.p2 == Approx(1.5 * 0.16));
  CHECK(correlation(ModelKind::Rosner, 0.4, 1.5) ==
        Approx((1.5 - 1) * 0.4 / 0.6));
}

TEST_CASE("common-correlation model probabilities") {
  const double pi = 0.3, rho = 0.4;
  const auto p = joint_probs(ModelKind::Donner, pi, rho);
  CHECK(p.p0 == Approx((1 - pi) * (1 - pi + pi * rho)));
  CHECK(p.p1 == Approx(2 * pi * (1 - pi) * (1 - rho)));
  CHECK(p.p2 == Approx(pi * (pi + (1 - pi) * rho)));
  CHECK(correlation(ModelKind::Donner, pi, rho) == Approx(rho));
}

TEST_CASE("conditional-probability model") {
  const double pi = 0.25, gamma = 0.6;
  const auto p = joint_probs(ModelKind::Dallal, pi, gamma);
  CHECK(p.p0 == Approx(1 - (2 - gamma) * pi));
  CHECK(p.p1 == Approx(2 * pi * (1 - gamma)));
  CHECK(p.p2 == Approx(pi * gamma));
  CHECK(correlation(ModelKind::Dallal, pi, gamma) ==
        Approx((gamma - pi) / (1 - pi)));
}

TEST_CASE("copula model at pi=0.5 theta=1 gives uniform thirds") {
  const auto p = joint_probs(ModelKind::ClaytonCopula, 0.5, 1.0);
  CHECK(p.p0 == Approx(1.0 / 3.0));
  CHECK(p.p1 == Approx(1.0 / 3.0));
  CHECK(p.p2 == Approx(1.0 / 3.0));
}

TEST_CASE("probabilities sum to one across models") {
  std::mt19937_64 rng(42);
  for (const auto model :
       {ModelKind::Independence, ModelKind::Rosner, ModelKind::Donner,
        ModelKind::Dallal, ModelKind::ClaytonCopula}) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto [pi, kappa] = random_point(model, rng);
      const auto p = joint_probs(model, pi, kappa);
      CHECK(p.p0 + p.p1 + p.p2 == Approx(1.0).epsilon(1e-10));
      CHECK(p.p0 >= 0.0);
      CHECK(p.p1 >= 0.0);
      CHECK(p.p2 >= 0.0);
    }
  }
}

TEST_CASE("copula probabilities valid for extreme theta") {
  for (const double theta : {1e-8, 1e-3, 1.0, 50.0, 500.0}) {
    for (const double pi : {0.01, 0.3, 0.5, 0.7, 0.99}) {
      const auto p = joint_probs(ModelKind::ClaytonCopula, pi, theta);
      CHECK(p.p0 >= 0.0);
      CHECK(p.p1 >= -1e-12);
      CHECK(p.p2 >= -1e-12);
      CHECK(p.p0 + p.p1 + p.p2 == Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("nuisance domains") {
  SECTION("constant-ratio, all pi below half") {
    const auto d = nuisance_domain(ModelKind::Rosner, {0.3, 0.4});
    CHECK(d.hi == Approx(2.5));
    CHECK(d.lo == Approx(0.0));
    CHECK(d.lo_open);
  }
  SECTION("constant-ratio, max pi above half") {
    const auto d = nuisance_domain(ModelKind::Rosner, {0.8});
    CHECK(d.hi == Approx(1.25));
    CHECK(d.lo == Approx((2 - 1.25) / 0.8));
  }
  SECTION("common-correlation lower bound") {
    const auto d = nuisance_domain(ModelKind::Donner, {0.3});
    CHECK(d.hi == Approx(1.0));
    CHECK(d.lo == Approx(std::max(-0.3 / 0.7, -0.7 / 0.3)));
  }
  SECTION("conditional-probability shift") {
    const auto d1 = nuisance_domain(ModelKind::Dallal, {0.4});
    CHECK(d1.lo == Approx(0.0));
    CHECK(d1.hi == Approx(1.0));
    const auto d2 = nuisance_domain(ModelKind::Dallal, {0.8});
    CHECK(d2.lo == Approx(2 - 1.25));
  }
}

TEST_CASE("log likelihood kernel matches direct computation") {
  FrequencyTable table;
  table.groups.push_back({21, 9, 14, 38, 24});
  ParamVector params;
  params.pis = {0.45};
  params.kappa = 1.3;
  const auto p = joint_probs(ModelKind::Rosner, 0.45, 1.3);
  const double expected = 21 * std::log(p.p0) + 9 * std::log(p.p1) +
                          14 * std::log(p.p2) + 38 * std::log(0.55) +
                          24 * std::log(0.45);
  CHECK(log_likelihood(ModelKind::Rosner, params, table) == Approx(expected));
}

TEST_CASE("score functions agree with finite differences") {
  std::mt19937_64 rng(7);
  FrequencyTable table;
  table.groups.push_back({11, 7, 5, 9, 6});
  const double h = 1e-6;
  for (const auto model : {ModelKind::Rosner, ModelKind::Donner,
                           ModelKind::Dallal, ModelKind::ClaytonCopula}) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto [pi, kappa] = random_point(model, rng);
      ParamVector params;
      params.pis = {pi};
      params.kappa = kappa;
      auto ll = [&](double p, double k) {
        ParamVector q;
        q.pis = {p};
        q.kappa = k;
        return log_likelihood(model, q, table);
      };
      auto sk = [&](double k) {
        ParamVector q;
        q.pis = {pi};
        q.kappa = k;
        return score_kappa(model, q, table);
      };
      const double fd_pi = (ll(pi + h, kappa) - ll(pi - h, kappa)) / (2 * h);
      const double fd_kappa = (ll(pi, kappa + h) - ll(pi, kappa - h)) / (2 * h);
      const double fd2_kappa = (sk(kappa + h) - sk(kappa - h)) / (2 * h);
      CHECK(score_pi(model, params, table, 0) ==
            Approx(fd_pi).margin(1e-3 * (1 + std::fabs(fd_pi))));
      CHECK(score_kappa(model, params, table) ==
            Approx(fd_kappa).margin(1e-3 * (1 + std::fabs(fd_kappa))));
      CHECK(d2_kappa(model, params, table) ==
            Approx(fd2_kappa).margin(2e-2 * (1 + std::fabs(fd2_kappa))));
    }
  }
}

TEST_CASE("copula second derivative matches frozen reference value") {
  FrequencyTable table;
  table.groups.push_back({1, 1, 1, 0, 0});
  ParamVector params;
  params.pis = {0.5};
  params.kappa = 1.0;
  CHECK(d2_kappa(ModelKind::ClaytonCopula, params, table) ==
        Approx(-0.18252574663536328).epsilon(1e-10));
}

TEST_CASE("nesting: special parameter values recover independence") {
  for (const double pi : {0.1, 0.37, 0.5, 0.82}) {
    const auto indep = joint_probs(ModelKind::Independence, pi, 0.0);
    for (const auto& [model, kappa] :
         {std::pair{ModelKind::Rosner, 1.0}, std::pair{ModelKind::Donner, 0.0},
          std::pair{ModelKind::Dallal, pi},
          std::pair{ModelKind::ClaytonCopula, 1e-9}}) {
      const auto p = joint_probs(model, pi, kappa);
      CHECK(p.p0 == Approx(indep.p0).margin(1e-6));
      CHECK(p.p1 == Approx(indep.p1).margin(1e-6));
      CHECK(p.p2 == Approx(indep.p2).margin(1e-6));
    }
  }
}

TEST_CASE("inadmissible parameters are rejected") {
  CHECK_THROWS(joint_probs(ModelKind::Rosner, 0.6, 2.0));      // p1 < 0
  CHECK_THROWS(joint_probs(ModelKind::Donner, 0.5, -1.5));     // rho < -1
  CHECK_THROWS(joint_probs(ModelKind::Dallal, 0.9, 0.05));     // p0 < 0
  CHECK_THROWS(joint_probs(ModelKind::ClaytonCopula, 0.5, -1.0));
}
