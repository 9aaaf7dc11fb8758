#pragma once

// Response generation and the replication harness for simulation studies.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "irtols/em_nr.hpp"
#include "irtols/em_ols.hpp"

namespace irtols {

enum class Estimator { OLS, NR };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view text);

inline constexpr double kOutlierMaxAbsB = 5.0;
inline constexpr double kOutlierMinA = 0.1;
inline constexpr double kOutlierMaxA = 3.0;

// Draws theta ~ N(0, 1) per person, then independent Bernoulli responses.
ResponseMatrix generate(std::span<const ItemParams> true_params, long n_persons,
                        std::uint64_t seed);

// Seed of the stream used for replication `rep` of a study seeded with `seed`.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep);

bool is_outlier_b(const ItemParams& p, bool degenerate = false);
bool is_outlier_a(const ItemParams& p, ModelKind model, bool degenerate = false);
bool is_outlier(const ItemParams& p, ModelKind model, bool degenerate = false);

struct StudyDesign {
  std::vector<ItemParams> true_params;
  long n_persons = 5000;
  int reps = 500;
  ModelKind model = ModelKind::OnePL;
  std::vector<int> quads;  // T values
  std::uint64_t seed = 1;
  std::vector<Estimator> estimators{Estimator::OLS};
  int max_iter = 500;
  double tol = 1e-4;
  int threads = 1;

  // b = {-3,-1.5,0,1.5,3}; a = {.3,.725,1.15,1.575,2} for the 2PL, 1 for the 1PL.
  static StudyDesign standard(ModelKind model);
  void validate() const;  // throws std::invalid_argument
};

// Estimates of one fit of one replication.
struct FitRecord {
  bool ok = false;
  std::string error;
  bool converged = false;
  int iterations = 0;
  double millis = 0.0;
  std::vector<ItemParams> params;
  std::vector<bool> degenerate;
};

// All fits of one replication, indexed [estimator][quad].
struct ReplicationRecord {
  std::vector<std::vector<FitRecord>> fits;
};

struct SummaryRow {
  int item = 0;  // 1-based
  Estimator estimator = Estimator::OLS;
  int n_quads = 0;
  double true_a = 0, true_b = 0;
  double mean_a = 0, mean_b = 0;  // unfiltered
  double rmse_a = 0, rmse_b = 0;  // unfiltered
  int outliers = 0;               // either parameter out of range
  int outliers_a = 0, outliers_b = 0;
  double filtered_mean_a = 0, filtered_mean_b = 0;
  int reps = 0;                   // successful fits
  int failures = 0;
  int nonconverged = 0;

  bool operator==(const SummaryRow&) const = default;
};

struct TimingStats {
  Estimator estimator = Estimator::OLS;
  int n_quads = 0;
  int fits = 0;
  double mean_ms = 0, min_ms = 0, max_ms = 0;
};

struct StudySummary {
  std::vector<SummaryRow> rows;  // ordered by estimator, n_quads, item
  std::vector<TimingStats> timing;

  const SummaryRow& row(Estimator e, int n_quads, int item) const;
};

struct StudyRun {
  StudySummary summary;
  std::vector<ReplicationRecord> replications;
};

// Replications run on design.threads workers; the summary does not depend on
// the worker count.
StudyRun run_study(const StudyDesign& design);
StudySummary replicate_study(const StudyDesign& design);

// Same aggregation over the quadrature sweep {2,3,4,5,8,10,15} unless the
// design already lists quadrature counts.
StudySummary quad_study(StudyDesign design);

// Aggregates replication records into summary rows.
StudySummary summarize(const StudyDesign& design, const std::vector<ReplicationRecord>& reps);

// Drops records in which the given item (0-based) is an outlier. Idempotent.
std::vector<FitRecord> filter_outliers(const std::vector<FitRecord>& records, int item,
                                       ModelKind model);

inline const std::vector<int> kQuadSweep{2, 3, 4, 5, 8, 10, 15};

}  // namespace irtols
