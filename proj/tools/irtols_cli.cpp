// irtols: fit 1PL/2PL item parameters and run simulation studies.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "irtols/em_nr.hpp"
#include "irtols/em_ols.hpp"
#include "irtols/patterns.hpp"
#include "irtols/report.hpp"
#include "irtols/simgen.hpp"

using namespace irtols;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNonConvergence = 2;

struct FitArgs {
  std::string input;
  std::string model = "2pl";
  std::string estimator = "ols";
  int n_quads = 0;
  double tol = 1e-4;
  int max_iter = 500;
  std::string out;
  std::string format = "json";
};

struct StudyArgs {
  std::string model = "1pl";
  std::string estimator = "ols";
  int n_quads = 0;
  std::vector<int> quads;
  int reps = 500;
  long n_persons = 5000;
  std::uint64_t seed = 1;
  std::vector<double> true_a;
  std::vector<double> true_b;
  int threads = 0;
  double tol = 1e-4;
  int max_iter = 500;
  std::string out;
};

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("IRT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid IRT_THREADS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open '" + path + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_fit(const FitArgs& args) {
  RunManifest manifest;
  manifest.command = "fit";
  manifest.started = utc_timestamp();

  ModelKind model;
  PatternData data;
  try {
    model = parse_model_kind(args.model);
    if (args.estimator != "ols" && args.estimator != "nr" && args.estimator != "both")
      throw std::invalid_argument("unknown estimator '" + args.estimator + "'");
    if (args.format != "json" && args.format != "csv")
      throw std::invalid_argument("unknown format '" + args.format + "'");
    const std::string bytes = read_file(args.input);
    manifest.input_digest = digest(bytes);
    std::istringstream in(bytes);
    data = tabulate(read_response_csv(in));
  } catch (const IngestionError& e) {
    std::cerr << "error: " << args.input << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  for (int j : extreme_items(data))
    std::cerr << "warning: item " << j + 1 << " has no response variation\n";

  FitConfig cfg = FitConfig::defaults_for(model);
  if (args.n_quads > 0) cfg.n_quads = args.n_quads;
  cfg.tol = args.tol;
  cfg.max_iter = args.max_iter;
  manifest.config = {{"input", args.input},     {"model", to_string(model)},
                     {"estimator", args.estimator}, {"n_quads", cfg.n_quads},
                     {"tol", cfg.tol},          {"max_iter", cfg.max_iter},
                     {"n_items", data.n_items}, {"n_persons", data.n_persons}};

  std::vector<std::pair<std::string, FitResult>> fits;
  try {
    if (args.estimator != "nr") fits.emplace_back("ols", fit(data, cfg));
    if (args.estimator != "ols") {
      NRConfig nr;
      nr.base = cfg;
      fits.emplace_back("nr", fit_nr(data, nr));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: estimation failed: " << e.what() << '\n';
    return kExitInput;
  }
  manifest.finished = utc_timestamp();

  json disagreement = nullptr;
  if (fits.size() == 2) {
    double da = 0, db = 0;
    for (int j = 0; j < data.n_items; ++j) {
      da = std::max(da, std::abs(fits[0].second.params[j].a() - fits[1].second.params[j].a()));
      db = std::max(db, std::abs(fits[0].second.params[j].b() - fits[1].second.params[j].b()));
    }
    disagreement = {{"a", da}, {"b", db}};
  }

  std::string text;
  if (args.format == "json") {
    json doc = fit_to_json(fits.front().second, model);
    doc["estimator"] = fits.front().first;
    if (fits.size() == 2) {
      json ref = fit_to_json(fits[1].second, model);
      ref["estimator"] = fits[1].first;
      doc["reference"] = ref;
      doc["max_abs_disagreement"] = disagreement;
    }
    json out = {{"schema_version", kSchemaVersion}, {"manifest", manifest.to_json()}};
    out.update(doc);
    text = out.dump(2) + "\n";
  } else {
    std::ostringstream ss;
    for (std::size_t k = 0; k < fits.size(); ++k) {
      std::ostringstream block;
      write_fit_csv(block, fits[k].second, model, fits[k].first);
      std::string s = block.str();
      if (k > 0) s = s.substr(s.find('\n') + 1);
      ss << s;
    }
    text = ss.str();
  }

  try {
    if (args.out.empty()) {
      std::cout << text;
      if (args.format == "csv" && !disagreement.is_null())
        std::cerr << "max abs disagreement: " << disagreement.dump() << '\n';
    } else {
      write_text(args.out, text);
      if (args.format == "csv") {
        json side = {{"schema_version", kSchemaVersion},
                     {"manifest", manifest.to_json()},
                     {"output", args.out}};
        if (!disagreement.is_null()) side["max_abs_disagreement"] = disagreement;
        write_text(args.out + ".manifest.json", side.dump(2) + "\n");
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  bool all_converged = true;
  for (const auto& [name, f] : fits) {
    if (!f.converged) {
      std::cerr << "warning: " << name << " estimator did not converge in " << f.iterations
                << " iterations\n";
      all_converged = false;
    }
  }
  return all_converged ? kExitOk : kExitNonConvergence;
}

int cmd_study(const StudyArgs& args, bool sweep) {
  RunManifest manifest;
  manifest.command = sweep ? "quadstudy" : "simulate";
  manifest.started = utc_timestamp();

  StudyDesign design;
  try {
    design.model = parse_model_kind(args.model);
    const StudyDesign standard = StudyDesign::standard(ModelKind::TwoPL);
    std::vector<double> b = args.true_b;
    if (b.empty())
      for (const auto& p : standard.true_params) b.push_back(p.b());
    std::vector<double> a = args.true_a;
    if (a.empty()) {
      if (design.model == ModelKind::TwoPL && args.true_b.empty()) {
        for (const auto& p : standard.true_params) a.push_back(p.a());
      } else {
        a.assign(b.size(), 1.0);
      }
    }
    if (a.size() != b.size()) {
      throw std::invalid_argument(fmt::format("--true-a has {} values but --true-b has {}",
                                              a.size(), b.size()));
    }
    for (std::size_t i = 0; i < b.size(); ++i)
      design.true_params.push_back(ItemParams::from_difficulty(a[i], b[i]));

    design.estimators.clear();
    if (args.estimator == "ols" || args.estimator == "both") design.estimators.push_back(Estimator::OLS);
    if (args.estimator == "nr" || args.estimator == "both") design.estimators.push_back(Estimator::NR);
    if (design.estimators.empty())
      throw std::invalid_argument("unknown estimator '" + args.estimator + "'");

    if (sweep) {
      design.quads = args.quads.empty() ? kQuadSweep : args.quads;
    } else {
      design.quads = {args.n_quads > 0 ? args.n_quads
                                       : FitConfig::defaults_for(design.model).n_quads};
    }
    design.reps = args.reps;
    design.n_persons = args.n_persons;
    design.seed = args.seed;
    design.tol = args.tol;
    design.max_iter = args.max_iter;
    design.threads = resolve_threads(args.threads);
    design.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  json true_params = json::array();
  for (const auto& p : design.true_params) true_params.push_back({{"a", p.a()}, {"b", p.b()}});
  json estimators = json::array();
  for (auto e : design.estimators) estimators.push_back(to_string(e));
  manifest.config = {{"model", to_string(design.model)}, {"estimators", estimators},
                     {"quads", design.quads},              {"reps", design.reps},
                     {"n_persons", design.n_persons},      {"seed", design.seed},
                     {"true_params", true_params},         {"tol", design.tol},
                     {"max_iter", design.max_iter},        {"threads", design.threads}};
  manifest.seed = design.seed;
  {
    json cfg = manifest.config;
    cfg.erase("threads");
    manifest.input_digest = digest(cfg.dump());
  }

  const StudySummary summary = replicate_study(design);
  manifest.finished = utc_timestamp();

  std::ostringstream csv;
  write_summary_csv(csv, summary);
  try {
    if (args.out.empty()) {
      std::cout << csv.str();
    } else {
      const std::string csv_path = args.out + ".csv";
      write_text(csv_path, csv.str());
      json doc = {{"schema_version", kSchemaVersion},
                  {"manifest", manifest.to_json()},
                  {"outputs", {csv_path}},
                  {"summary", summary_to_json(summary)}};
      write_text(args.out + ".json", doc.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

void add_study_options(CLI::App* cmd, StudyArgs& args) {
  cmd->add_option("--model", args.model, "1pl or 2pl")->capture_default_str();
  cmd->add_option("--estimator", args.estimator, "ols, nr or both")->capture_default_str();
  cmd->add_option("--reps", args.reps, "Replications")->capture_default_str();
  cmd->add_option("--n-persons", args.n_persons, "Persons per dataset")->capture_default_str();
  cmd->add_option("--seed", args.seed, "Study seed")->capture_default_str();
  cmd->add_option("--true-a", args.true_a, "Generating discriminations")->delimiter(',');
  cmd->add_option("--true-b", args.true_b, "Generating difficulties")->delimiter(',');
  cmd->add_option("--threads", args.threads, "Worker threads (overrides IRT_THREADS)");
  cmd->add_option("--tol", args.tol, "Convergence threshold")->capture_default_str();
  cmd->add_option("--max-iter", args.max_iter, "Maximum EM iterations")->capture_default_str();
  cmd->add_option("--out", args.out, "Output prefix; writes PREFIX.csv and PREFIX.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Item parameter estimation for 1PL/2PL models by EM with a closed-form OLS M-step"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate item parameters from a 0/1 response CSV");
  fit_cmd->add_option("input", fit_args.input, "Response CSV, one person per row")->required();
  fit_cmd->add_option("--model", fit_args.model, "1pl or 2pl")->capture_default_str();
  fit_cmd->add_option("--estimator", fit_args.estimator, "ols, nr or both")->capture_default_str();
  fit_cmd->add_option("--n-quads", fit_args.n_quads,
                      "Quadrature points (default 2 for 1pl, 4 for 2pl)")
      ->check(CLI::Range(1, kMaxQuadraturePoints));
  fit_cmd->add_option("--tol", fit_args.tol, "Convergence threshold")->capture_default_str();
  fit_cmd->add_option("--max-iter", fit_args.max_iter, "Maximum EM iterations")->capture_default_str();
  fit_cmd->add_option("--out", fit_args.out, "Output file (stdout when omitted)");
  fit_cmd->add_option("--format", fit_args.format, "json or csv")->capture_default_str();

  StudyArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo replication study");
  add_study_options(sim_cmd, sim_args);
  sim_cmd->add_option("--n-quads", sim_args.n_quads,
                      "Quadrature points (default 2 for 1pl, 4 for 2pl)")
      ->check(CLI::Range(1, kMaxQuadraturePoints));

  StudyArgs quad_args;
  auto* quad_cmd = app.add_subcommand("quadstudy", "Replication study across quadrature counts");
  add_study_options(quad_cmd, quad_args);
  quad_cmd->add_option("--quads", quad_args.quads, "Quadrature counts (default 2,3,4,5,8,10,15)")
      ->delimiter(',')
      ->check(CLI::Range(1, kMaxQuadraturePoints));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (*fit_cmd) return cmd_fit(fit_args);
  if (*sim_cmd) return cmd_study(sim_args, false);
  return cmd_study(quad_args, true);
}
