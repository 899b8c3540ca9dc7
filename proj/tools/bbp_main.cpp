// Command-line front end: closed-form analysis, Monte Carlo simulation,
// exact policy oracle, and parameter sweeps with plot-ready output.

#include "bbp/bbp.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace bbp;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInternal = 4;

std::int64_t parse_int(std::string_view token) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ConfigError(ConfigErrorKind::out_of_range, "bad integer: " + std::string(token));
  return value;
}

// Accepts "4", "1..5", or comma lists thereof (CLI11 splits the commas).
std::vector<std::int64_t> expand_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::int64_t> values;
  for (const std::string& token : tokens) {
    const std::size_t dots = token.find("..");
    if (dots == std::string::npos) {
      values.push_back(parse_int(token));
      continue;
    }
    const std::int64_t lo = parse_int(token.substr(0, dots));
    const std::int64_t hi = parse_int(token.substr(dots + 2));
    for (std::int64_t v = lo; v <= hi; ++v) values.push_back(v);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty())
    throw ConfigError(ConfigErrorKind::out_of_range, "empty parameter range");
  return values;
}

std::int64_t single_value(const std::vector<std::string>& tokens, const char* name) {
  if (tokens.size() != 1 || tokens.front().find("..") != std::string::npos)
    throw ConfigError(ConfigErrorKind::out_of_range,
                      std::string(name) + " expects a single value here");
  return parse_int(tokens.front());
}

PolicyMode parse_mode(const std::string& mode) {
  if (mode == "canonical") return PolicyMode::canonical;
  if (mode == "random") return PolicyMode::seeded_random;
  throw ConfigError(ConfigErrorKind::out_of_range, "mode must be canonical or random");
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv("BBP_ORACLE_BUDGET")) {
    return static_cast<std::uint64_t>(parse_int(env));
  }
  return kDefaultOracleBudget;
}

struct OutputSink {
  std::string format = "csv";
  std::string path;

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot open output file: " + path);
    file << text;
  }

  void write_json(const Json& document) const {
    write(document.dump(2) + "\n");
  }
};

Json json_document(Json rows) {
  return Json{{"schema", kResultsSchema}, {"rows", std::move(rows)}};
}

int cmd_analyze(const std::vector<std::string>& m_tokens, const std::vector<std::string>& l_tokens,
                const std::vector<std::string>& b_tokens, const OutputSink& sink) {
  std::string csv = analyze_csv_header();
  Json rows = Json::array();
  for (std::int64_t m : expand_tokens(m_tokens))
    for (std::int64_t l : expand_tokens(l_tokens))
      for (std::int64_t b : expand_tokens(b_tokens)) {
        const DistortionFormulaReport report = min_distortion(validate_config(m, l, b));
        csv += analyze_csv_row(report);
        rows.push_back(to_json(report));
      }
  if (sink.format == "json")
    sink.write_json(json_document(std::move(rows)));
  else
    sink.write(csv);
  return kExitOk;
}

int cmd_simulate(std::int64_t m, std::int64_t l, std::int64_t b, const std::string& policy_name,
                 const std::string& mode, std::int64_t blocks, std::uint64_t seed,
                 const OutputSink& sink) {
  const BlockConfig cfg = validate_config(m, l, b);
  const auto policy = make_policy(cfg, policy_name, parse_mode(mode));
  const SimulationReport report = run_experiment(cfg, *policy, blocks, RngSeed{seed});
  if (sink.format == "json") {
    sink.write_json(json_document(Json::array({to_json(report)})));
  } else {
    sink.write(results_csv_header() + results_csv_row(report) + class_histogram_comment(report));
  }
  return kExitOk;
}

int cmd_oracle(std::int64_t m, std::int64_t l, std::int64_t b, std::uint64_t budget,
               const std::string& engine, const OutputSink& sink) {
  const BlockConfig cfg = validate_config(m, l, b);
  const OracleResult result = engine == "naive" ? minimize_over_policies_naive(cfg, budget)
                                                : minimize_over_policies(cfg, budget);
  const DistortionFormulaReport formula = min_distortion(cfg);
  if (sink.format == "json") {
    sink.write_json(json_document(Json::array({to_json(result, formula, engine)})));
  } else {
    sink.write(oracle_csv_header() + oracle_csv_row(result, formula, engine) +
               probe_table_comment(result.argmin_tree));
  }
  return kExitOk;
}

int cmd_sweep(const std::vector<std::string>& m_tokens, const std::vector<std::string>& l_tokens,
              const std::vector<std::string>& b_tokens, std::vector<std::string> policies,
              std::int64_t blocks, std::uint64_t seed, const OutputSink& sink) {
  std::sort(policies.begin(), policies.end());
  policies.erase(std::unique(policies.begin(), policies.end()), policies.end());
  if (policies.empty())
    throw ConfigError(ConfigErrorKind::out_of_range, "empty policy list");

  std::string csv = results_csv_header();
  Json rows = Json::array();
  for (std::int64_t m : expand_tokens(m_tokens))
    for (std::int64_t l : expand_tokens(l_tokens))
      for (std::int64_t b : expand_tokens(b_tokens)) {
        const BlockConfig cfg = validate_config(m, l, b);
        for (const std::string& policy_name : policies) {
          const auto policy = make_policy(cfg, policy_name);
          if (blocks > 0) {
            const SimulationReport report = run_experiment(cfg, *policy, blocks, RngSeed{seed});
            csv += results_csv_row(report);
            rows.push_back(to_json(report));
          } else {
            // formula-only row: empirical columns stay empty
            const DistortionFormulaReport formula = min_distortion(cfg);
            std::ostringstream line;
            line << cfg.m << ',' << cfg.l << ',' << cfg.b_peak << ',' << policy->name() << ','
                 << to_string(policy->mode()) << ",0," << seed << ",,,"
                 << format_double(formula.d_min.as_double()) << ','
                 << (formula.zero_distortion ? "true" : "false") << '\n';
            csv += line.str();
            Json row = to_json(formula);
            row["policy"] = policy->name();
            rows.push_back(row);
          }
        }
      }
  if (sink.format == "json")
    sink.write_json(json_document(std::move(rows)));
  else
    sink.write(csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binary beam-pointing channel toolkit"};
  app.require_subcommand(1);

  OutputSink sink;
  app.add_option("--format", sink.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--output", sink.path, "output file (default stdout)");

  std::vector<std::string> m_tokens, l_tokens, b_tokens;
  std::vector<std::string> policies{"optimal"};
  std::string policy_name = "optimal";
  std::string mode = "canonical";
  std::string engine = "reduced";
  std::int64_t blocks_sim = 10000;
  std::int64_t blocks_sweep = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = default_budget();

  auto add_triple = [&](CLI::App* cmd) {
    cmd->fallthrough();  // route --format/--output up to the parent
    cmd->add_option("--m", m_tokens, "directions M (value, list, or a..b range)")
        ->required()
        ->delimiter(',');
    cmd->add_option("--l", l_tokens, "block length L")->required()->delimiter(',');
    cmd->add_option("--b-peak", b_tokens, "peak input weight")->required()->delimiter(',');
  };

  CLI::App* analyze = app.add_subcommand("analyze", "closed-form minimum distortion");
  add_triple(analyze);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo experiment");
  add_triple(simulate);
  simulate->add_option("--policy", policy_name, "optimal | sweep | random:w")
      ->capture_default_str();
  simulate->add_option("--mode", mode, "canonical | random")->capture_default_str();
  simulate->add_option("--blocks", blocks_sim, "number of blocks")->capture_default_str();
  simulate->add_option("--seed", seed, "master seed")->capture_default_str();

  CLI::App* oracle = app.add_subcommand("oracle", "exact minimum over deterministic policies");
  add_triple(oracle);
  oracle->add_option("--budget", budget, "max policies to enumerate (env BBP_ORACLE_BUDGET)")
      ->capture_default_str();
  oracle->add_option("--engine", engine, "reduced | naive")
      ->check(CLI::IsMember({"reduced", "naive"}))
      ->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "cartesian sweep over triples and policies");
  add_triple(sweep);
  sweep->add_option("--policy", policies, "policy list")->delimiter(',')->capture_default_str();
  sweep->add_option("--blocks", blocks_sweep, "blocks per cell (0 = formula only)")
      ->capture_default_str();
  sweep->add_option("--seed", seed, "master seed")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (analyze->parsed()) return cmd_analyze(m_tokens, l_tokens, b_tokens, sink);
    if (simulate->parsed())
      return cmd_simulate(single_value(m_tokens, "--m"), single_value(l_tokens, "--l"),
                          single_value(b_tokens, "--b-peak"), policy_name, mode, blocks_sim,
                          seed, sink);
    if (oracle->parsed())
      return cmd_oracle(single_value(m_tokens, "--m"), single_value(l_tokens, "--l"),
                        single_value(b_tokens, "--b-peak"), budget, engine, sink);
    if (sweep->parsed())
      return cmd_sweep(m_tokens, l_tokens, b_tokens, policies, blocks_sweep, seed, sink);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << " (estimate " << e.estimate() << ", budget "
              << e.budget() << ")\n";
    return kExitBudget;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConstraintError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
