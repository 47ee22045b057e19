#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>

#include "paired_gof/estimation.hpp"
#include "paired_gof/io.hpp"
#include "paired_gof/models.hpp"

using namespace paired_gof;

namespace {

FrequencyTable load(const char* name) {
  std::ifstream in(std::string(PAIRED_GOF_DATA_DIR) + "/" + name);
  REQUIRE(in.good());
  return parse_frequency_table(in, TableFormat::Json);
}

double aic_of(const FitResult& fit, const FrequencyTable& table) {
  const int k = fit.model == ModelKind::Independence
                    ? int(table.g())
                    : int(table.g()) + 1;
  return 2.0 * k - 2.0 * fit.loglik;
}

}  // namespace

TEST_CASE("independence fit is the closed-form pooled proportion") {
  const auto table = load("ome.json");
  const auto fit_res = fit(ModelKind::Independence, table);
  REQUIRE(fit_res.converged);
  CHECK(fit_res.params.pis[0] == Catch::Approx(61.0 / 150.0).epsilon(1e-12));
  CHECK(fit_res.params.pis[1] == Catch::Approx(72.0 / 128.0).epsilon(1e-12));
  CHECK_FALSE(fit_res.params.kappa.has_value());
}

TEST_CASE("nuisance-model fits reach the frozen optima") {
  const auto ome = load("ome.json");

  struct Case {
    ModelKind model;
    double kappa;
    double aic;
  };
  const Case cases[] = {
      {ModelKind::Rosner, 1.687285, 329.4285},
      {ModelKind::Donner, 0.673403, 330.3617},
      {ModelKind::Dallal, 0.833474, 332.1132},
      {ModelKind::ClaytonCopula, 4.020042, 329.2583},
  };
  for (const auto& c : cases) {
    const auto res = fit(c.model, ome);
    INFO(model_name(c.model));
    REQUIRE(res.converged);
    CHECK(*res.params.kappa == Catch::Approx(c.kappa).margin(2e-4));
    CHECK(aic_of(res, ome) == Catch::Approx(c.aic).margin(5e-4));
  }
}

TEST_CASE("sparse combined table fit matches frozen optimum") {
  const auto myopia = load("myopia.json");
  const auto res = fit(ModelKind::Rosner, myopia);
  REQUIRE(res.converged);
  CHECK(*res.params.kappa == Catch::Approx(1.251774).margin(2e-4));
  CHECK(aic_of(res, myopia) == Catch::Approx(67.5026).margin(5e-4));
}

TEST_CASE("purely bilateral table fit matches frozen optimum") {
  const auto rp = load("rp.json");
  const auto rosner = fit(ModelKind::Rosner, rp);
  REQUIRE(rosner.converged);
  CHECK(*rosner.params.kappa == Catch::Approx(1.663850).margin(2e-4));
  CHECK(aic_of(rosner, rp) == Catch::Approx(449.9490).margin(5e-4));
  const auto donner = fit(ModelKind::Donner, rp);
  CHECK(aic_of(donner, rp) == Catch::Approx(443.7967).margin(5e-4));
}

TEST_CASE("converged interior fits are stationary points") {
  const auto ome = load("ome.json");
  FitOptions tight;
  tight.tol = 1e-10;
  tight.max_iter = 5000;
  for (ModelKind model : {ModelKind::Rosner, ModelKind::Donner,
                          ModelKind::Dallal, ModelKind::ClaytonCopula}) {
    const auto res = fit(model, ome, tight);
    INFO(model_name(model));
    REQUIRE(res.converged);
    if (res.boundary) continue;
    CHECK(std::fabs(score_kappa(model, res.params, ome)) < 1e-3);
    for (std::size_t i = 0; i < ome.g(); ++i)
      CHECK(std::fabs(score_pi(model, res.params, ome, i)) < 1e-3);
  }
}

TEST_CASE("fit log-likelihood dominates a dense parameter grid") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> cell(0, 12);
  for (int trial = 0; trial < 12; ++trial) {
    FrequencyTable table;
    for (int i = 0; i < 2; ++i) {
      GroupCounts grp;
      grp.m0 = cell(rng) + 1;
      grp.m1 = cell(rng) + 1;
      grp.m2 = cell(rng) + 1;
      grp.n0 = cell(rng);
      grp.n1 = cell(rng);
      table.groups.push_back(grp);
      table.labels.push_back("g");
    }
    for (ModelKind model : {ModelKind::Rosner, ModelKind::Donner,
                            ModelKind::Dallal, ModelKind::ClaytonCopula}) {
      const auto res = fit(model, table);
      INFO(model_name(model) << " trial " << trial);
      REQUIRE(res.converged);
      // Grid oracle: profile over a kappa sweep with per-group pi sweeps.
      double best = -std::numeric_limits<double>::infinity();
      for (int jk = 1; jk < 80; ++jk) {
        const double t = double(jk) / 80.0;
        const double kappa = model == ModelKind::Donner ? 2.0 * t - 1.0
                             : model == ModelKind::Dallal ? t
                                                          : std::exp(6.0 * t - 3.0);
        double total = 0.0;
        bool ok = true;
        for (const auto& grp : table.groups) {
          double gbest = -std::numeric_limits<double>::infinity();
          for (int jp = 1; jp < 200; ++jp) {
            const double pi = double(jp) / 200.0;
            ParamVector p;
            p.pis = {pi};
            p.kappa = kappa;
            FrequencyTable one;
            one.groups = {grp};
            one.labels = {"g"};
            try {
              gbest = std::max(gbest, log_likelihood(model, p, one));
            } catch (const std::exception&) {
            }
          }
          if (!std::isfinite(gbest)) ok = false;
          total += gbest;
        }
        if (ok) best = std::max(best, total);
      }
      CHECK(res.loglik >= best - 1e-6);
    }
  }
}

TEST_CASE("missing bilateral severity forces the boundary flag path") {
  // All bilateral responders in both cells of one group pushes Dallal's
  // conditional probability to its upper limit.
  FrequencyTable table;
  GroupCounts grp;
  grp.m0 = 6;
  grp.m1 = 0;
  grp.m2 = 9;
  grp.n0 = 3;
  grp.n1 = 4;
  table.groups = {grp};
  table.labels = {"g"};
  const auto res = fit(ModelKind::Dallal, table);
  REQUIRE(res.converged);
  CHECK(*res.params.kappa > 0.9);
}

TEST_CASE("fit is deterministic") {
  const auto myopia = load("myopia.json");
  const auto a = fit(ModelKind::ClaytonCopula, myopia);
  const auto b = fit(ModelKind::ClaytonCopula, myopia);
  CHECK(a.loglik == b.loglik);
  CHECK(*a.params.kappa == *b.params.kappa);
}

TEST_CASE("unidentifiable nuisance is rejected") {
  FrequencyTable table;
  GroupCounts grp;
  grp.n0 = 5;
  grp.n1 = 7;
  table.groups = {grp};
  table.labels = {"u"};
  CHECK_THROWS_AS(fit(ModelKind::Rosner, table), invalid_input);
  CHECK_NOTHROW(fit(ModelKind::Independence, table));
}
