#include "irtols/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace irtols {

using nlohmann::json;

namespace {

constexpr const char* kSummaryHeader =
    "item,estimator,n_quads,true_a,true_b,mean_a,mean_b,rmse_a,rmse_b,outliers,reps,"
    "outliers_a,outliers_b,filtered_mean_a,filtered_mean_b,failures,nonconverged";

// JSON has no NaN; emit null instead.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json item_flags(const FitResult& fit, std::size_t j) {
  json flags = json::array();
  if (j < fit.degenerate.size() && fit.degenerate[j]) flags.push_back("degenerate_slope");
  if (j < fit.clamped.size() && fit.clamped[j]) flags.push_back("clamped_proportion");
  if (j < fit.gradient_fallback.size() && fit.gradient_fallback[j])
    flags.push_back("gradient_fallback");
  return flags;
}

}  // namespace

json RunManifest::to_json() const {
  return {{"command", command}, {"config", config},      {"seed", seed},
          {"version", version}, {"started", started},    {"finished", finished},
          {"input_digest", input_digest}};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("fnv1a64:{:016x}", h);
}

json fit_to_json(const FitResult& fit, ModelKind model) {
  json items = json::array();
  for (std::size_t j = 0; j < fit.params.size(); ++j) {
    const auto& p = fit.params[j];
    const bool deg = j < fit.degenerate.size() && fit.degenerate[j];
    items.push_back({{"index", j + 1},
                     {"a", p.a()},
                     {"b", p.b()},
                     {"tau", p.tau()},
                     {"outlier", is_outlier(p, model, deg)},
                     {"flags", item_flags(fit, j)}});
  }
  return {{"items", items},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"loglik", fit.loglik_trace.empty() ? json(nullptr) : number(fit.loglik_trace.back())},
          {"phi_max", fit.phi_max_trace.empty() ? json(nullptr) : number(fit.phi_max_trace.back())},
          {"loglik_decreased", fit.loglik_decreased},
          {"trace", {{"loglik", fit.loglik_trace}, {"max_delta", fit.max_delta_trace}}}};
}

void write_fit_csv(std::ostream& out, const FitResult& fit, ModelKind model,
                   std::string_view estimator) {
  out << "estimator,index,a,b,tau,outlier,flags,converged,iterations,loglik,phi_max\n";
  const double loglik = fit.loglik_trace.empty() ? NAN : fit.loglik_trace.back();
  const double phi = fit.phi_max_trace.empty() ? NAN : fit.phi_max_trace.back();
  for (std::size_t j = 0; j < fit.params.size(); ++j) {
    const auto& p = fit.params[j];
    const bool deg = j < fit.degenerate.size() && fit.degenerate[j];
    std::string flags;
    for (const auto& f : item_flags(fit, j)) {
      if (!flags.empty()) flags += ';';
      flags += f.get<std::string>();
    }
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", estimator, j + 1, p.a(), p.b(),
                       p.tau(), is_outlier(p, model, deg) ? 1 : 0, flags,
                       fit.converged ? 1 : 0, fit.iterations, loglik, phi);
  }
}

void write_summary_csv(std::ostream& out, const StudySummary& summary) {
  out << kSummaryHeader << '\n';
  for (const auto& r : summary.rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.item,
                       to_string(r.estimator), r.n_quads, r.true_a, r.true_b, r.mean_a,
                       r.mean_b, r.rmse_a, r.rmse_b, r.outliers, r.reps, r.outliers_a,
                       r.outliers_b, r.filtered_mean_a, r.filtered_mean_b, r.failures,
                       r.nonconverged);
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty summary CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSummaryHeader) throw std::runtime_error("unexpected summary CSV header");

  std::vector<SummaryRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 17)
      throw std::runtime_error("summary CSV line " + std::to_string(line_no) +
                               " has " + std::to_string(f.size()) + " fields");
    const auto d = [&](int k) { return std::strtod(f[k].c_str(), nullptr); };
    const auto i = [&](int k) { return std::stoi(f[k]); };
    SummaryRow r;
    r.item = i(0);
    r.estimator = parse_estimator(f[1]);
    r.n_quads = i(2);
    r.true_a = d(3);
    r.true_b = d(4);
    r.mean_a = d(5);
    r.mean_b = d(6);
    r.rmse_a = d(7);
    r.rmse_b = d(8);
    r.outliers = i(9);
    r.reps = i(10);
    r.outliers_a = i(11);
    r.outliers_b = i(12);
    r.filtered_mean_a = d(13);
    r.filtered_mean_b = d(14);
    r.failures = i(15);
    r.nonconverged = i(16);
    rows.push_back(r);
  }
  return rows;
}

json summary_to_json(const StudySummary& summary) {
  json rows = json::array();
  for (const auto& r : summary.rows) {
    rows.push_back({{"item", r.item},
                    {"estimator", to_string(r.estimator)},
                    {"n_quads", r.n_quads},
                    {"true_a", r.true_a},
                    {"true_b", r.true_b},
                    {"mean_a", number(r.mean_a)},
                    {"mean_b", number(r.mean_b)},
                    {"rmse_a", number(r.rmse_a)},
                    {"rmse_b", number(r.rmse_b)},
                    {"outliers", r.outliers},
                    {"outliers_a", r.outliers_a},
                    {"outliers_b", r.outliers_b},
                    {"filtered_mean_a", number(r.filtered_mean_a)},
                    {"filtered_mean_b", number(r.filtered_mean_b)},
                    {"reps", r.reps},
                    {"failures", r.failures},
                    {"nonconverged", r.nonconverged}});
  }
  json timing = json::array();
  for (const auto& t : summary.timing) {
    timing.push_back({{"estimator", to_string(t.estimator)},
                      {"n_quads", t.n_quads},
                      {"fits", t.fits},
                      {"mean_ms", number(t.mean_ms)},
                      {"min_ms", number(t.min_ms)},
                      {"max_ms", number(t.max_ms)}});
  }
  return {{"rows", rows}, {"timing", timing}};
}

}  // namespace irtols
