#include "irtols/simgen.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace irtols {

std::string_view to_string(Estimator e) { return e == Estimator::OLS ? "ols" : "nr"; }

Estimator parse_estimator(std::string_view text) {
  if (text == "ols") return Estimator::OLS;
  if (text == "nr") return Estimator::NR;
  throw std::invalid_argument("unknown estimator '" + std::string(text) + "' (expected ols or nr)");
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep) {
  // SplitMix64 finalizer over (seed, rep); distinct reps give decorrelated streams.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (rep + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ResponseMatrix generate(std::span<const ItemParams> true_params, long n_persons,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> ability(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ResponseMatrix out(n_persons, ResponseRow(true_params.size()));
  for (auto& row : out) {
    const double theta = ability(rng);
    for (std::size_t i = 0; i < true_params.size(); ++i)
      row[i] = unit(rng) < irf(true_params[i], theta) ? 1 : 0;
  }
  return out;
}

bool is_outlier_b(const ItemParams& p, bool degenerate) {
  return degenerate || !(std::abs(p.b()) < kOutlierMaxAbsB);
}

bool is_outlier_a(const ItemParams& p, ModelKind model, bool degenerate) {
  if (degenerate) return true;
  if (model == ModelKind::OnePL) return false;
  return !(p.a() > kOutlierMinA && p.a() < kOutlierMaxA);
}

bool is_outlier(const ItemParams& p, ModelKind model, bool degenerate) {
  return is_outlier_b(p, degenerate) || is_outlier_a(p, model, degenerate);
}

StudyDesign StudyDesign::standard(ModelKind model) {
  StudyDesign d;
  d.model = model;
  const std::vector<double> b{-3.0, -1.5, 0.0, 1.5, 3.0};
  const std::vector<double> a{0.3, 0.725, 1.15, 1.575, 2.0};
  for (std::size_t i = 0; i < b.size(); ++i)
    d.true_params.push_back(
        ItemParams::from_difficulty(model == ModelKind::TwoPL ? a[i] : 1.0, b[i]));
  d.quads = {model == ModelKind::OnePL ? 2 : 4};
  return d;
}

void StudyDesign::validate() const {
  if (true_params.empty()) throw std::invalid_argument("design has no items");
  if (n_persons < 1) throw std::invalid_argument("n_persons must be at least 1");
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  if (quads.empty()) throw std::invalid_argument("design has no quadrature counts");
  if (estimators.empty()) throw std::invalid_argument("design has no estimators");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  for (int q : quads) {
    FitConfig cfg{model, q, max_iter, tol, 1.0, 0.0};
    cfg.validate();
  }
}

const SummaryRow& StudySummary::row(Estimator e, int n_quads, int item) const {
  for (const auto& r : rows)
    if (r.estimator == e && r.n_quads == n_quads && r.item == item) return r;
  throw std::out_of_range("no summary row for " + std::string(to_string(e)) + ", T=" +
                          std::to_string(n_quads) + ", item " + std::to_string(item));
}

namespace {

FitRecord run_fit(const PatternData& data, const StudyDesign& design, Estimator estimator,
                  int n_quads) {
  FitRecord rec;
  FitConfig cfg{design.model, n_quads, design.max_iter, design.tol, 1.0, 0.0};
  const auto start = std::chrono::steady_clock::now();
  try {
    FitResult res;
    if (estimator == Estimator::OLS) {
      res = fit(data, cfg);
    } else {
      NRConfig nr;
      nr.base = cfg;
      res = fit_nr(data, nr);
    }
    rec.ok = true;
    rec.converged = res.converged;
    rec.iterations = res.iterations;
    rec.params = std::move(res.params);
    rec.degenerate = std::move(res.degenerate);
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

ReplicationRecord run_replication(const StudyDesign& design, int rep) {
  ReplicationRecord out;
  out.fits.resize(design.estimators.size());
  PatternData data;
  std::string error;
  try {
    data = tabulate(generate(design.true_params, design.n_persons,
                             replication_seed(design.seed, static_cast<std::uint64_t>(rep))));
  } catch (const std::exception& e) {
    error = e.what();
  }
  for (std::size_t e = 0; e < design.estimators.size(); ++e) {
    for (int q : design.quads) {
      if (!error.empty()) {
        FitRecord failed;
        failed.error = error;
        out.fits[e].push_back(std::move(failed));
        continue;
      }
      out.fits[e].push_back(run_fit(data, design, design.estimators[e], q));
    }
  }
  return out;
}

}  // namespace

std::vector<FitRecord> filter_outliers(const std::vector<FitRecord>& records, int item,
                                       ModelKind model) {
  std::vector<FitRecord> kept;
  for (const auto& r : records)
    if (r.ok && !is_outlier(r.params[item], model, r.degenerate[item])) kept.push_back(r);
  return kept;
}

StudySummary summarize(const StudyDesign& design, const std::vector<ReplicationRecord>& reps) {
  StudySummary summary;
  const int n_items = static_cast<int>(design.true_params.size());
  for (std::size_t e = 0; e < design.estimators.size(); ++e) {
    for (std::size_t q = 0; q < design.quads.size(); ++q) {
      std::vector<FitRecord> records;
      records.reserve(reps.size());
      for (const auto& rep : reps) records.push_back(rep.fits[e][q]);

      TimingStats timing{design.estimators[e], design.quads[q], 0, 0.0,
                         std::numeric_limits<double>::infinity(), 0.0};
      for (const auto& r : records) {
        ++timing.fits;
        timing.mean_ms += r.millis;
        timing.min_ms = std::min(timing.min_ms, r.millis);
        timing.max_ms = std::max(timing.max_ms, r.millis);
      }
      if (timing.fits > 0) timing.mean_ms /= timing.fits;
      summary.timing.push_back(timing);

      for (int i = 0; i < n_items; ++i) {
        SummaryRow row;
        row.item = i + 1;
        row.estimator = design.estimators[e];
        row.n_quads = design.quads[q];
        row.true_a = design.true_params[i].a();
        row.true_b = design.true_params[i].b();
        double sum_a = 0, sum_b = 0, sq_a = 0, sq_b = 0;
        for (const auto& r : records) {
          if (!r.ok) {
            ++row.failures;
            continue;
          }
          ++row.reps;
          if (!r.converged) ++row.nonconverged;
          const ItemParams& p = r.params[i];
          sum_a += p.a();
          sum_b += p.b();
          sq_a += (p.a() - row.true_a) * (p.a() - row.true_a);
          sq_b += (p.b() - row.true_b) * (p.b() - row.true_b);
          const bool deg = r.degenerate[i];
          if (is_outlier_a(p, design.model, deg)) ++row.outliers_a;
          if (is_outlier_b(p, deg)) ++row.outliers_b;
          if (is_outlier(p, design.model, deg)) ++row.outliers;
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (row.reps > 0) {
          row.mean_a = sum_a / row.reps;
          row.mean_b = sum_b / row.reps;
          row.rmse_a = std::sqrt(sq_a / row.reps);
          row.rmse_b = std::sqrt(sq_b / row.reps);
        } else {
          row.mean_a = row.mean_b = row.rmse_a = row.rmse_b = nan;
        }
        const auto kept = filter_outliers(records, i, design.model);
        if (kept.empty()) {
          row.filtered_mean_a = row.filtered_mean_b = nan;
        } else {
          double fa = 0, fb = 0;
          for (const auto& r : kept) {
            fa += r.params[i].a();
            fb += r.params[i].b();
          }
          row.filtered_mean_a = fa / static_cast<double>(kept.size());
          row.filtered_mean_b = fb / static_cast<double>(kept.size());
        }
        summary.rows.push_back(row);
      }
    }
  }
  return summary;
}

StudyRun run_study(const StudyDesign& design) {
  design.validate();
  StudyRun run;
  run.replications.resize(design.reps);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int rep = next++; rep < design.reps; rep = next++)
      run.replications[rep] = run_replication(design, rep);
  };
  const int n_workers = std::min(design.threads, design.reps);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  run.summary = summarize(design, run.replications);
  return run;
}

StudySummary replicate_study(const StudyDesign& design) { return run_study(design).summary; }

StudySummary quad_study(StudyDesign design) {
  if (design.quads.empty()) design.quads = kQuadSweep;
  return replicate_study(design);
}

}  // namespace irtols
