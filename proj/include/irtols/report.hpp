#pragma once

// Serialization of fits and study summaries.

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "irtols/em_ols.hpp"
#include "irtols/simgen.hpp"

namespace irtols {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string started;
  std::string finished;
  std::string input_digest;

  nlohmann::json to_json() const;
};

std::string utc_timestamp();
// FNV-1a 64-bit digest, hex encoded.
std::string digest(std::string_view bytes);

// {index, a, b, tau, outlier, flags} per item plus the trace block.
nlohmann::json fit_to_json(const FitResult& fit, ModelKind model);

void write_fit_csv(std::ostream& out, const FitResult& fit, ModelKind model,
                   std::string_view estimator);

void write_summary_csv(std::ostream& out, const StudySummary& summary);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

nlohmann::json summary_to_json(const StudySummary& summary);

}  // namespace irtols
