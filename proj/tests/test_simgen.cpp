#include <cmath>

#include <doctest.h>

#include "irtols/simgen.hpp"

using namespace irtols;

namespace {

double proportion_correct(const ResponseMatrix& m, int item) {
  long sum = 0;
  for (const auto& row : m) sum += row[item];
  return static_cast<double>(sum) / static_cast<double>(m.size());
}

StudyDesign small_design(ModelKind model, int reps, long n) {
  StudyDesign d = StudyDesign::standard(model);
  d.reps = reps;
  d.n_persons = n;
  d.seed = 123;
  return d;
}

}  // namespace

TEST_CASE("generated responses follow the model") {
  const std::vector<ItemParams> centered{ItemParams::from_difficulty(1, 0)};
  CHECK(std::abs(proportion_correct(generate(centered, 100000, 1), 0) - 0.5) < 0.005);

  const std::vector<ItemParams> easy{ItemParams::from_difficulty(1, -10)};
  CHECK(proportion_correct(generate(easy, 20000, 2), 0) >= 0.999);

  const auto items = StudyDesign::standard(ModelKind::TwoPL).true_params;
  CHECK(generate(items, 500, 99) == generate(items, 500, 99));
  CHECK(generate(items, 500, 99) != generate(items, 500, 100));
}

TEST_CASE("replication seeds are distinct") {
  CHECK(replication_seed(1, 0) != replication_seed(1, 1));
  CHECK(replication_seed(1, 0) != replication_seed(2, 0));
  CHECK(replication_seed(5, 7) == replication_seed(5, 7));
}

TEST_CASE("outlier ranges") {
  CHECK_FALSE(is_outlier(ItemParams::from_difficulty(2.112, 3.05), ModelKind::TwoPL));
  CHECK(is_outlier(ItemParams::from_difficulty(3.5, 0), ModelKind::TwoPL));
  CHECK(is_outlier(ItemParams::from_difficulty(1, 5.0), ModelKind::TwoPL));
  CHECK(is_outlier(ItemParams::from_difficulty(1, -5.0), ModelKind::OnePL));
  CHECK(is_outlier(ItemParams::from_difficulty(0.1, 0), ModelKind::TwoPL));
  CHECK(is_outlier(ItemParams::from_difficulty(3.0, 0), ModelKind::TwoPL));
  CHECK_FALSE(is_outlier(ItemParams::from_difficulty(0.1001, 4.99), ModelKind::TwoPL));
  CHECK_FALSE(is_outlier(ItemParams::from_difficulty(3.5, 0), ModelKind::OnePL));
  CHECK(is_outlier(ItemParams::from_difficulty(1, 0), ModelKind::OnePL, true));
  CHECK(is_outlier_a(ItemParams::from_difficulty(-1, 0), ModelKind::TwoPL));
  CHECK_FALSE(is_outlier_b(ItemParams::from_difficulty(-1, 0)));
}

TEST_CASE("a single replication restates its fit") {
  const StudyDesign d = small_design(ModelKind::TwoPL, 1, 2000);
  const StudySummary s = replicate_study(d);
  const PatternData data = tabulate(generate(d.true_params, d.n_persons, replication_seed(d.seed, 0)));
  const FitResult f = fit(data, FitConfig::defaults_for(ModelKind::TwoPL));
  REQUIRE(s.rows.size() == 5);
  for (int i = 0; i < 5; ++i) {
    const SummaryRow& r = s.row(Estimator::OLS, 4, i + 1);
    CHECK(r.reps == 1);
    CHECK(r.mean_a == f.params[i].a());
    CHECK(r.mean_b == f.params[i].b());
    CHECK(r.rmse_a == doctest::Approx(std::abs(f.params[i].a() - d.true_params[i].a())));
    CHECK(r.rmse_b == doctest::Approx(std::abs(f.params[i].b() - d.true_params[i].b())));
  }
}

TEST_CASE("studies are reproducible and independent of the worker count") {
  StudyDesign d = small_design(ModelKind::TwoPL, 12, 1500);
  d.estimators = {Estimator::OLS, Estimator::NR};
  d.quads = {3, 4};
  const StudySummary one = replicate_study(d);
  d.threads = 3;
  const StudySummary three = replicate_study(d);
  CHECK(one.rows == three.rows);
  CHECK(one.rows.size() == 2 * 2 * 5);
  CHECK(replicate_study(d).rows == three.rows);
  for (const auto& r : one.rows) {
    CHECK(r.outliers <= r.reps);
    CHECK(r.rmse_a >= 0.0);
    CHECK(r.rmse_b >= 0.0);
  }
}

TEST_CASE("quad study sweeps the default quadrature counts") {
  StudyDesign d = small_design(ModelKind::OnePL, 2, 800);
  d.quads.clear();
  const StudySummary s = quad_study(d);
  CHECK(s.rows.size() == kQuadSweep.size() * 5);
  CHECK(s.timing.size() == kQuadSweep.size());
  CHECK_NOTHROW(s.row(Estimator::OLS, 15, 5));
  CHECK_THROWS_AS(s.row(Estimator::NR, 15, 5), std::out_of_range);
}

TEST_CASE("outlier filter is idempotent and failures are recorded") {
  StudyDesign d = small_design(ModelKind::TwoPL, 3, 100);
  auto good = [](double a, double b) {
    FitRecord r;
    r.ok = true;
    r.converged = true;
    r.params.assign(5, ItemParams::from_difficulty(a, b));
    r.degenerate.assign(5, false);
    return r;
  };
  FitRecord failed;
  failed.error = "boom";
  std::vector<ReplicationRecord> reps(3);
  reps[0].fits = {{good(1.0, 0.5)}};
  reps[1].fits = {{good(3.5, 0.5)}};
  reps[2].fits = {{failed}};

  const std::vector<FitRecord> records{good(1.0, 0.5), good(3.5, 0.5), good(1.0, 7.0), failed};
  const auto once = filter_outliers(records, 0, ModelKind::TwoPL);
  const auto twice = filter_outliers(once, 0, ModelKind::TwoPL);
  CHECK(once.size() == 1);
  CHECK(twice.size() == once.size());

  const StudySummary s = summarize(d, reps);
  const SummaryRow& r = s.row(Estimator::OLS, 4, 1);
  CHECK(r.reps == 2);
  CHECK(r.failures == 1);
  CHECK(r.outliers == 1);
  CHECK(r.outliers_a == 1);
  CHECK(r.outliers_b == 0);
  CHECK(r.mean_a == doctest::Approx(2.25));
  CHECK(r.filtered_mean_a == doctest::Approx(1.0));
}

TEST_CASE("RMSE of non-extreme items shrinks as the sample grows") {
  for (ModelKind model : {ModelKind::OnePL, ModelKind::TwoPL}) {
    for (Estimator est : {Estimator::OLS, Estimator::NR}) {
      std::vector<StudySummary> by_n;
      for (long n : {500L, 5000L, 50000L}) {
        StudyDesign d = small_design(model, 20, n);
        d.estimators = {est};
        by_n.push_back(replicate_study(d));
      }
      const int q = FitConfig::defaults_for(model).n_quads;
      for (int item = 2; item <= 4; ++item) {
        CAPTURE(item);
        double prev_b = INFINITY, prev_a = INFINITY;
        for (const auto& s : by_n) {
          const SummaryRow& r = s.row(est, q, item);
          CHECK(r.rmse_b < prev_b);
          prev_b = r.rmse_b;
          if (model == ModelKind::TwoPL) {
            CHECK(r.rmse_a < prev_a);
            prev_a = r.rmse_a;
          }
        }
      }
    }
  }
}

TEST_CASE("design validation") {
  StudyDesign d = StudyDesign::standard(ModelKind::OnePL);
  CHECK_NOTHROW(d.validate());
  d.reps = 0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = StudyDesign::standard(ModelKind::TwoPL);
  d.quads = {1};
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = StudyDesign::standard(ModelKind::TwoPL);
  d.true_params.clear();
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK(parse_estimator("nr") == Estimator::NR);
  CHECK_THROWS(parse_estimator("mirt"));
}
