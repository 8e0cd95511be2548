// trashfire: survival analysis for adversarial ML experiment logs.
//
// Subcommands wire ingestion -> fitting -> validation -> cost analysis ->
// report emission. All JSON output is canonical (sorted keys, fixed float
// formatting), so identical inputs and seeds produce byte-identical files.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trashfire/trashfire.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trashfire;

namespace {

void diag(const std::string& level, int code, const std::string& msg) {
  std::string escaped;
  for (char c : msg) {
    if (c == '"' || c == '\\') escaped.push_back('\\');
    escaped.push_back(c == '\n' ? ' ' : c);
  }
  std::cerr << "level=" << level << " code=" << code << " msg=\"" << escaped
            << "\"\n";
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) diag("warn", 0, w);
}

unsigned worker_cap() {
  if (const char* env = std::getenv("TRASHFIRE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string family_suffixed_path(const std::string& out, const std::string& family) {
  const fs::path p(out);
  fs::path dir = p.parent_path();
  const std::string ext = p.extension().string();
  const std::string stem = p.stem().string();
  return (dir / (stem + "." + family + ext)).string();
}

struct SplitSpec {
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
};

json split_to_json(const SplitSpec& s) {
  return json{{"seed", s.seed}, {"test_fraction", s.test_fraction}};
}

SplitSpec split_from_json(const json& j) {
  SplitSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.test_fraction = j.at("test_fraction").get<double>();
  return s;
}

struct LoadedModel {
  AnyModel model;
  EncodingMeta meta;
  SplitSpec split;
  std::string family;
};

LoadedModel load_model_file(const std::string& path) {
  const json j = read_json_file(path);
  LoadedModel out;
  out.family = j.at("family").get<std::string>();
  if (is_cox_json(j))
    out.model = cox_model_from_json(j);
  else
    out.model = aft_model_from_json(j);
  if (!j.contains("encoding"))
    throw SchemaError("model file '" + path + "' carries no encoding block");
  out.meta = meta_from_json(j.at("encoding"));
  if (j.contains("split")) out.split = split_from_json(j.at("split"));
  return out;
}

math::Vector profile_for(const SurvivalDataset& subset, const std::string& spec) {
  math::Vector profile = mean_profile(subset);
  if (spec == "mean") return profile;
  json j;
  try {
    j = json::parse(spec);
  } catch (const json::exception& e) {
    throw ContractError(std::string("--profile must be 'mean' or a JSON object: ") +
                        e.what());
  }
  if (!j.is_object()) throw ContractError("--profile JSON must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto pos = std::find(subset.feature_names.begin(),
                               subset.feature_names.end(), it.key());
    if (pos == subset.feature_names.end())
      throw ContractError("--profile names unknown feature '" + it.key() + "'");
    profile[static_cast<std::size_t>(pos - subset.feature_names.begin())] =
        it.value().get<double>();
  }
  return profile;
}

// --- fit ---------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::string format = "csv";
  std::string family = "weibull";
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  std::string out = "model.json";
};

json fit_one(const std::string& family, const SurvivalDataset& train,
             const EncodingMeta& meta, const SplitSpec& split,
             std::size_t n_test) {
  json j;
  if (family == "cox") {
    const CoxModel model = fit_cox(train);
    j = model_to_json(model);
  } else {
    const AftModel model = fit_aft(family_from_string(family), train);
    j = model_to_json(model);
  }
  j["encoding"] = meta_to_json(meta);
  j["split"] = split_to_json(split);
  j["n_train"] = train.n();
  j["n_test"] = n_test;
  j["n_events_train"] = train.n_events();
  return j;
}

int cmd_fit(const FitArgs& args) {
  const auto records = parse_log_file(args.input, log_format_from_string(args.format));
  if (records.empty()) throw ContractError("fit: input log has no records");
  const SplitSpec split{args.seed, args.test_fraction};
  auto [train, test] = encode(records, split.seed, split.test_fraction);
  warn_all(train.warnings);
  warn_all(test.warnings);

  const std::vector<std::string> families = split_list(args.family);
  if (families.empty()) throw ContractError("fit: no family given");
  for (const auto& f : families)
    if (f != "cox") family_from_string(f);  // validate names up front

  if (families.size() == 1) {
    const json j = fit_one(families[0], train, train.meta, split, test.n());
    write_json_file(args.out, j);
    diag("info", 0, "wrote " + args.out);
    return 0;
  }

  // Multi-family grid: per-family workers, capped by TRASHFIRE_THREADS.
  std::vector<json> results(families.size());
  std::vector<std::string> errors(families.size());
  std::atomic<std::size_t> next{0};
  const unsigned n_workers =
      std::min<unsigned>(worker_cap(), static_cast<unsigned>(families.size()));
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= families.size()) return;
      try {
        results[i] = fit_one(families[i], train, train.meta, split, test.n());
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < families.size(); ++i)
    if (!errors[i].empty())
      throw ContractError("fit(" + families[i] + "): " + errors[i]);
  for (std::size_t i = 0; i < families.size(); ++i) {
    const std::string path = family_suffixed_path(args.out, families[i]);
    write_json_file(path, results[i]);
    diag("info", 0, "wrote " + path);
  }
  return 0;
}

// --- validate ----------------------------------------------------------

struct ValidateArgs {
  std::string model;
  std::string input;
  std::string format = "csv";
  std::string horizon = "median";
  int knots = 5;
  int qq_grid = 100;
  std::string qq_window = "all";
  std::string out = "report.json";
};

std::pair<double, double> parse_window(const std::string& s) {
  if (s == "all") return {0.0, math::inf};
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw ContractError("--qq-window must be 'all' or lo:hi");
  return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
}

int cmd_validate(const ValidateArgs& args) {
  const LoadedModel loaded = load_model_file(args.model);
  const auto records = parse_log_file(args.input, log_format_from_string(args.format));
  if (records.empty()) throw ContractError("validate: input log has no records");

  // Reproduce the model's split, then encode both sides with its stored
  // train statistics.
  const auto [train_rows, test_rows] =
      split_rows(records.size(), loaded.split.seed, loaded.split.test_fraction);
  const SurvivalDataset train =
      apply_encoding(records, train_rows, loaded.meta, SplitTag::train);
  const SurvivalDataset test =
      apply_encoding(records, test_rows, loaded.meta, SplitTag::test);
  warn_all(train.warnings);
  warn_all(test.warnings);

  const double horizon =
      args.horizon == "median" ? default_horizon(train) : std::stod(args.horizon);
  const auto [qq_lo, qq_hi] = parse_window(args.qq_window);

  ValidationReport rep;
  if (std::holds_alternative<CoxModel>(loaded.model)) {
    const CoxModel& m = std::get<CoxModel>(loaded.model);
    rep = validate_model(m, train, test.n() > 0 ? &test : nullptr, horizon, args.knots);
    rep.qq_train = qq_calibration_data(m, train, args.qq_grid, qq_lo, qq_hi);
    if (test.n() > 0)
      rep.qq_test = qq_calibration_data(m, test, args.qq_grid, qq_lo, qq_hi);
  } else {
    const AftModel& m = std::get<AftModel>(loaded.model);
    rep = validate_model(m, train, test.n() > 0 ? &test : nullptr, horizon, args.knots);
    rep.qq_train = qq_calibration_data(m, train, args.qq_grid, qq_lo, qq_hi);
    if (test.n() > 0)
      rep.qq_test = qq_calibration_data(m, test, args.qq_grid, qq_lo, qq_hi);
  }

  write_json_file(args.out, report_to_json(rep));
  diag("info", 0, "wrote " + args.out);
  return 0;
}

// --- trash -------------------------------------------------------------

struct TrashArgs {
  std::string model;
  std::string input;
  std::string format = "csv";
  double epsilon_max = math::inf;
  std::string t_train = "from-data";
  std::string profile = "mean";
  double t_star = 0.0;  // 0 = latest observed time in the subset
  bool refit = false;
  std::string out = "trash.json";
};

int cmd_trash(const TrashArgs& args) {
  const LoadedModel loaded = load_model_file(args.model);
  const auto records = parse_log_file(args.input, log_format_from_string(args.format));
  if (records.empty()) throw ContractError("trash: input log has no records");

  const SurvivalDataset all = apply_encoding(records, loaded.meta, SplitTag::full);
  warn_all(all.warnings);
  const SurvivalDataset subset = conditional_subset(all, args.epsilon_max);

  const double t_star =
      args.t_star > 0.0
          ? args.t_star
          : *std::max_element(subset.times.begin(), subset.times.end());

  const math::Vector profile = profile_for(subset, args.profile);

  AnyModel model = loaded.model;
  if (args.refit) {
    if (std::holds_alternative<CoxModel>(model))
      model = fit_cox(subset);
    else
      model = fit_aft(std::get<AftModel>(model).family, subset);
    diag("info", 0, "refit " + loaded.family + " on conditional subset (n=" +
                        std::to_string(subset.n()) + ")");
  }

  double expected = 0.0;
  if (std::holds_alternative<CoxModel>(model))
    expected = expected_survival(std::get<CoxModel>(model), profile, t_star);
  else
    expected = expected_survival(std::get<AftModel>(model), profile, t_star);

  double t_train = 0.0;
  if (args.t_train == "from-data") {
    for (double v : subset.raw_t_train) t_train += v;
    t_train /= static_cast<double>(subset.n());
  } else {
    t_train = std::stod(args.t_train);
  }

  const TrashReport rep = trash_score(t_train, expected, t_star);

  json j;
  j["epsilon_max"] = std::isfinite(args.epsilon_max) ? json(args.epsilon_max) : json(nullptr);
  j["expected_survival"] = rep.expected_survival;
  j["horizon"] = rep.horizon;
  j["model"] = loaded.family;
  j["n_subset"] = subset.n();
  json prof = json::object();
  for (std::size_t i = 0; i < profile.size(); ++i)
    prof[subset.feature_names[i]] = profile[i];
  j["profile"] = prof;
  j["refit"] = args.refit;
  j["t_train"] = rep.t_train;
  j["trash_score"] = rep.trash_score;
  j["verdict"] = rep.verdict();
  write_json_file(args.out, j);
  diag("info", 0, "wrote " + args.out + " (verdict=" + rep.verdict() + ")");
  return 0;
}

// --- simulate ----------------------------------------------------------

struct SimulateArgs {
  std::string spec;
  std::string out = "synthetic.csv";
};

int cmd_simulate(const SimulateArgs& args) {
  const GeneratorSpec spec = generator_spec_from_json(read_json_file(args.spec));
  const auto records = generate(spec);
  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw ContractError("cannot open output file '" + args.out + "'");
  write_csv(records, out);
  diag("info", 0, "wrote " + args.out + " (" + std::to_string(records.size()) +
                      " records)");
  return 0;
}

// --- report ------------------------------------------------------------

struct ReportArgs {
  std::string models;
  std::string reports;
  std::string trash;
  std::string out_dir = "reports";
};

int cmd_report(const ReportArgs& args) {
  const auto model_paths = split_list(args.models);
  const auto report_paths = split_list(args.reports);
  if (model_paths.empty()) throw ContractError("report: no models given");
  if (model_paths.size() != report_paths.size())
    throw ContractError("report: need one report per model");

  std::vector<std::pair<std::string, AnyModel>> models;
  std::vector<ValidationReport> reports;
  for (std::size_t i = 0; i < model_paths.size(); ++i) {
    const LoadedModel lm = load_model_file(model_paths[i]);
    models.emplace_back(fs::path(model_paths[i]).stem().string(), lm.model);
    reports.push_back(report_from_json(read_json_file(report_paths[i])));
  }

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);

  const auto rows = model_comparison_table(models, reports);
  write_text_file((dir / "comparison.csv").string(), comparison_table_csv(rows));
  diag("info", 0, "wrote " + (dir / "comparison.csv").string());

  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string& name = models[i].first;
    const auto coeffs = coefficient_plot_data(models[i].second);
    write_text_file((dir / ("coefficients_" + name + ".csv")).string(),
                    coefficients_csv(coeffs));
    write_text_file((dir / ("coefficients_" + name + ".svg")).string(),
                    coefficients_svg(coeffs, name + " coefficients (log scale)"));
    write_text_file((dir / ("qq_" + name + ".csv")).string(),
                    qq_csv(reports[i].qq_train, reports[i].qq_test));
    write_text_file((dir / ("qq_" + name + ".svg")).string(),
                    qq_svg(reports[i].qq_train, reports[i].qq_test, name));
  }

  if (!args.trash.empty()) {
    std::vector<TrashSummaryRow> trash_rows;
    for (const auto& path : split_list(args.trash)) {
      const json j = read_json_file(path);
      TrashSummaryRow row;
      row.name = fs::path(path).stem().string();
      row.t_train = j.at("t_train").get<double>();
      row.expected_survival = j.at("expected_survival").get<double>();
      row.trash_score = j.at("trash_score").get<double>();
      row.broken = j.at("verdict").get<std::string>() == "broken";
      trash_rows.push_back(std::move(row));
    }
    write_text_file((dir / "trash.csv").string(), trash_csv(trash_rows));
    write_text_file((dir / "trash.svg").string(), trash_svg(trash_rows));
    diag("info", 0, "wrote " + (dir / "trash.csv").string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survival analysis and cost-normalized robustness scoring for "
               "adversarial ML experiment logs"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit a survival model to a log");
  fit_cmd->add_option("--input", fit_args.input, "experiment log")->required();
  fit_cmd->add_option("--format", fit_args.format, "csv or jsonl");
  fit_cmd->add_option("--family", fit_args.family,
                      "weibull|log_normal|log_logistic|exponential|"
                      "generalized_gamma|cox (comma list fits a grid)");
  fit_cmd->add_option("--seed", fit_args.seed, "shuffle seed");
  fit_cmd->add_option("--test-fraction", fit_args.test_fraction, "held-out fraction");
  fit_cmd->add_option("--out", fit_args.out, "output model JSON");

  ValidateArgs val_args;
  auto* val_cmd = app.add_subcommand("validate", "score a fitted model");
  val_cmd->add_option("--model", val_args.model, "model JSON")->required();
  val_cmd->add_option("--input", val_args.input, "experiment log")->required();
  val_cmd->add_option("--format", val_args.format, "csv or jsonl");
  val_cmd->add_option("--horizon", val_args.horizon,
                      "calibration horizon in seconds, or 'median'");
  val_cmd->add_option("--knots", val_args.knots, "calibration spline knots");
  val_cmd->add_option("--qq-grid", val_args.qq_grid, "QQ grid size");
  val_cmd->add_option("--qq-window", val_args.qq_window,
                      "QQ time window 'lo:hi' or 'all'");
  val_cmd->add_option("--out", val_args.out, "output report JSON");

  TrashArgs trash_args;
  auto* trash_cmd = app.add_subcommand("trash", "cost-normalized verdict");
  trash_cmd->add_option("--model", trash_args.model, "model JSON")->required();
  trash_cmd->add_option("--input", trash_args.input, "experiment log")->required();
  trash_cmd->add_option("--format", trash_args.format, "csv or jsonl");
  trash_cmd->add_option("--epsilon-max", trash_args.epsilon_max,
                        "keep records with attack strength in (0, eps]");
  trash_cmd->add_option("--t-train", trash_args.t_train,
                        "seconds per training sample, or 'from-data'");
  trash_cmd->add_option("--profile", trash_args.profile,
                        "'mean' or a JSON object of covariate overrides");
  trash_cmd->add_option("--t-star", trash_args.t_star,
                        "integration horizon (default: latest observed time)");
  trash_cmd->add_flag("--refit", trash_args.refit, "refit on the conditional subset");
  trash_cmd->add_option("--out", trash_args.out, "output JSON");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic log");
  sim_cmd->add_option("--spec", sim_args.spec, "generator spec JSON")->required();
  sim_cmd->add_option("--out", sim_args.out, "output CSV");

  ReportArgs rep_args;
  auto* rep_cmd = app.add_subcommand("report", "emit comparison artifacts");
  rep_cmd->add_option("--models", rep_args.models, "comma-separated model JSONs")
      ->required();
  rep_cmd->add_option("--reports", rep_args.reports,
                      "comma-separated report JSONs (one per model)")
      ->required();
  rep_cmd->add_option("--trash", rep_args.trash, "comma-separated trash JSONs");
  rep_cmd->add_option("--out-dir", rep_args.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::stringstream dummy;
    app.exit(e, dummy, dummy);
    diag("error", 2, e.what());
    return 2;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_args);
    if (val_cmd->parsed()) return cmd_validate(val_args);
    if (trash_cmd->parsed()) return cmd_trash(trash_args);
    if (sim_cmd->parsed()) return cmd_simulate(sim_args);
    if (rep_cmd->parsed()) return cmd_report(rep_args);
  } catch (const Error& e) {
    diag("error", e.exit_code(), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    diag("error", 2, e.what());
    return 2;
  }
  return 0;
}
