// ionqec: command-line driver for encoding, feedback plans, circuits, storage
// experiments and property verification.
//
// Exit status: 0 success, 1 property failure, 2 configuration error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ionqec/errors.hpp"
#include "ionqec/harness.hpp"

namespace {

using nlohmann::json;
using namespace ionqec;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
}

void emit(const json& j, const CommonArgs& args, const std::string& file_name) {
  const std::string text = j.dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(args.out);
  std::ofstream(std::filesystem::path(args.out) / file_name, std::ios::binary) << text;
}

CodeScheme scheme_from_config(const json& cfg) {
  const int n_logical = cfg.value("n_logical", 1);
  if (!cfg.contains("scheme")) throw ValidationError("config needs a \"scheme\"");
  const json& s = cfg.at("scheme");
  if (s.is_string()) return CodeScheme::standard(code_kind_from_string(s.get<std::string>()), n_logical);
  return scheme_from_json(s);
}

LogicalState logical_from_config(const json& cfg, const CodeScheme& scheme, std::uint64_t seed) {
  if (!cfg.contains("logical")) {
    Rng rng = make_stream(seed, 0);
    return LogicalState::random(scheme.n_logical(), rng);
  }
  std::vector<Complex> amps;
  for (const auto& p : cfg.at("logical")) amps.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return LogicalState(std::move(amps));
}

int cmd_encode(const CommonArgs& args, bool dump_state) {
  const json cfg = load_config(args.config);
  const CodeScheme scheme = scheme_from_config(cfg);
  const std::uint64_t seed = args.seed.value_or(cfg.value("seed", std::uint64_t{1}));
  const LogicalState logical = logical_from_config(cfg, scheme, seed);
  const StateVector reg = encode(scheme, logical);
  const CodewordReport report = codeword_report(reg, scheme);
  json out = {{"scheme", scheme_to_json(scheme)},
              {"in_code_space", report.in_code_space},
              {"projection_deficit", report.projection_deficit},
              {"excitation_weights", report.excitation_weights}};
  if (dump_state || !args.out.empty()) out["state"] = state_to_json(reg);
  emit(out, args, "encode.json");
  return report.in_code_space ? 0 : kExitFailure;
}

int cmd_plan(const CommonArgs& args) {
  const json cfg = load_config(args.config);
  const CodeScheme scheme = scheme_from_config(cfg);
  scheme.validate(scheme.register_size());
  const int decayed = cfg.value("decayed_ion", scheme.data_ions.front());
  const FeedbackPlan plan = plan_for(scheme, decayed);
  TimingModel timing;
  if (cfg.contains("timing")) {
    const json& t = cfg.at("timing");
    timing.tau_cnot = t.value("tau_cnot", timing.tau_cnot);
    timing.tau_pi = t.value("tau_pi", timing.tau_pi);
    timing.tau_half_pi = t.value("tau_half_pi", timing.tau_half_pi);
    timing.tau_q = t.value("tau_q", timing.tau_q);
  }
  json out = plan_to_json(plan);
  out["tabulated_gate_count"] = gate_count_to_json(table_one_formula(scheme.kind, scheme.n_logical()));
  out["feedback_wall_time_s"] = feedback_wall_time(plan, timing);
  out["register_decoherence_time_s"] = decoherence_time(scheme.register_size(), timing.tau_q);
  if (gate_count(plan) != table_one_formula(scheme.kind, scheme.n_logical())) {
    std::cerr << "warning: constructed gate count differs from the tabulated formula for "
              << to_string(scheme.kind) << " with " << scheme.n_logical() << " logical qubits\n";
  }
  emit(out, args, "plan.json");
  return 0;
}

int cmd_run_circuit(const CommonArgs& args, bool dump_state) {
  const json cfg = load_config(args.config);
  if (!cfg.contains("circuit")) throw ValidationError("config needs a \"circuit\" array");
  StateVector state(1);
  if (cfg.contains("initial") && cfg.at("initial").is_object()) {
    state = state_from_json(cfg.at("initial"));
  } else {
    const int n = cfg.at("n_ions").get<int>();
    state = basis_state(n, cfg.value("initial", std::uint64_t{0}));
  }
  const CircuitRun run = run_circuit(std::move(state), circuit_from_json(cfg.at("circuit")));
  json out = {{"gate_count", gate_count_to_json(run.count)}};
  if (dump_state || !args.out.empty()) out["state"] = state_to_json(run.state);
  emit(out, args, "circuit_result.json");
  return 0;
}

int cmd_storage(const CommonArgs& args) {
  json cfg = load_config(args.config);
  if (args.seed) cfg["seed"] = *args.seed;
  const ExperimentConfig config = experiment_config_from_json(cfg);
  std::optional<std::filesystem::path> out;
  if (!args.out.empty()) out = args.out;
  const StorageSummary summary = storage_experiment(config, out);
  if (!out) std::cout << summary.summary.dump(2) << "\n";
  return 0;
}

int cmd_verify(const CommonArgs& args, std::string suite) {
  const json cfg = load_config(args.config);
  if (suite.empty()) suite = cfg.value("suite", std::string("all"));
  const std::uint64_t seed = args.seed.value_or(cfg.value("seed", std::uint64_t{2024}));
  const VerifyReport report = verify(suite, seed);
  print_report(report, std::cout);
  if (!args.out.empty()) {
    std::filesystem::create_directories(args.out);
    std::ofstream file(std::filesystem::path(args.out) / ("verify_" + suite + ".jsonl"));
    print_report(report, file);
  }
  return report.passed() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trapped-ion error correction against spontaneous emission"};
  app.require_subcommand(1);

  CommonArgs args;
  bool dump_state = false;
  std::string suite;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config, "JSON configuration file");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--seed", args.seed, "override the configured seed");
  };

  auto* encode_cmd = app.add_subcommand("encode", "encode a logical state and report the codeword");
  add_common(encode_cmd);
  encode_cmd->add_flag("--dump-state", dump_state, "include the state snapshot");
  auto* plan_cmd = app.add_subcommand("plan", "print the feedback circuit for a decayed ion");
  add_common(plan_cmd);
  auto* circuit_cmd = app.add_subcommand("run-circuit", "apply a JSON circuit to a register");
  add_common(circuit_cmd);
  circuit_cmd->add_flag("--dump-state", dump_state, "include the state snapshot");
  auto* storage_cmd =
      app.add_subcommand("storage-experiment", "corrected vs uncorrected storage ensembles");
  add_common(storage_cmd);
  auto* verify_cmd = app.add_subcommand("verify", "run a property suite");
  add_common(verify_cmd);
  verify_cmd->add_option("suite", suite, "algebra|codewords|recovery|invariance|oracle|counts|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*encode_cmd) return cmd_encode(args, dump_state);
    if (*plan_cmd) return cmd_plan(args);
    if (*circuit_cmd) return cmd_run_circuit(args, dump_state);
    if (*storage_cmd) return cmd_storage(args);
    if (*verify_cmd) return cmd_verify(args, suite);
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IndexError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SizeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
