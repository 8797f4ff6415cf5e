// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kdph/errors.hpp"
#include "kdph/experiment.hpp"
#include "kdph/meb.hpp"

namespace {

// Exit codes: 0 success (audit verdicts live inside the report), 2 parse
// error, 3 budget error, 4 convergence error, 5 config or contract error.
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;
constexpr int kExitConvergence = 4;
constexpr int kExitConfig = 5;

void emit_error(const std::string& type, const std::string& message,
                const nlohmann::ordered_json& extra = {}) {
  nlohmann::ordered_json e;
  e["error"]["type"] = type;
  e["error"]["message"] = message;
  for (const auto& [key, value] : extra.items()) {
    e["error"][key] = value;
  }
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persistent homology of the k-distance under random "
               "projections"};
  app.require_subcommand(1);

  kdph::ExperimentConfig config;
  CLI::App* run = app.add_subcommand(
      "run", "execute the full pipeline and write a JSON report");
  run->add_option("--input", config.input_path, "input point file")
      ->required();
  run->add_option("--k", config.k, "k of the k-distance")->required();
  run->add_option("--epsilon", config.epsilon, "distortion parameter in (0,1)")
      ->required();
  run->add_option("--delta", config.delta,
                  "failure probability for auto-gw (default 0.05)");
  run->add_option("--kind", config.projector_kind,
                  "gaussian|rademacher|sparse|identity (default gaussian)");
  run->add_option("--seed", config.seed, "RNG seed (default 0)");
  run->add_option("--dim", config.target_dim,
                  "auto-jl|auto-gw|<int> (default auto-jl)");
  run->add_option("--jl-constant", config.jl_constant,
                  "constant c in the auto-jl bound (default 8)");
  run->add_option("--filtration", config.filtration,
                  "exact-cech|approx-cech|rips (default approx-cech)");
  run->add_option("--maxdeg", config.max_homology_degree,
                  "largest homology degree (default 1)");
  run->add_option("--alpha-max", config.alpha_max, "filtration cutoff")
      ->required();
  run->add_option("--budget", config.budget,
                  "cap on C(n,k) for exact mode (default 200000)");
  run->add_option("--probes", config.probes,
                  "sampled simplices for the radius audit (default 500)");
  run->add_option("--max-card", config.radius_max_card,
                  "largest sampled simplex cardinality (default 6)");
  run->add_option("--out", config.out_path, "report destination")->required();
  run->add_option("--svg", config.svg_dir, "directory for diagram plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("config", e.what());
    return kExitConfig;
  }

  try {
    const kdph::ExperimentReport report = kdph::run(config);
    const auto& j = report.json;
    std::cout << "report: " << config.out_path << "\n";
    std::cout << "distortion: "
              << (j["distortion"]["is_epsilon_distortion"].get<bool>()
                      ? "pass"
                      : "fail")
              << "  pointwise: "
              << (j["pointwise_kdist"]["pass"].get<bool>() ? "pass" : "fail")
              << "  radius: "
              << (j["radius_checks"]["pass"].get<bool>() ? "pass" : "fail")
              << "  interleaving: "
              << (j["interleaving"]["passes"].get<bool>() ? "pass" : "fail")
              << "\n";
    return 0;
  } catch (const kdph::ParseError& e) {
    nlohmann::ordered_json extra;
    extra["line"] = e.line;
    emit_error("parse", e.what(), extra);
    return kExitParse;
  } catch (const kdph::BudgetExceeded& e) {
    nlohmann::ordered_json extra;
    extra["required"] = e.required;
    extra["budget"] = e.budget;
    emit_error("budget", e.what(), extra);
    return kExitBudget;
  } catch (const kdph::ConvergenceFailure& e) {
    nlohmann::ordered_json extra;
    extra["residual"] = e.best.residual;
    extra["iterations"] = e.best.iterations;
    emit_error("convergence", e.what(), extra);
    return kExitConvergence;
  } catch (const kdph::ContractViolation& e) {
    emit_error("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    emit_error("config", e.what());
    return kExitConfig;
  }
}
