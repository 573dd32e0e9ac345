#include "mpslearn/circuit_io.hpp"
#include "mpslearn/complexity.hpp"
#include "mpslearn/config.hpp"
#include "mpslearn/errors.hpp"
#include "mpslearn/learner.hpp"
#include "mpslearn/mps.hpp"
#include "mpslearn/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mpslearn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProperty = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitResource = 4;

constexpr int kManifestVersion = 1;
constexpr int kReportVersion = 1;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::PlanInfeasible: return kExitInfeasible;
    case ErrorCode::BackendTooLarge:
    case ErrorCode::TooLarge: return kExitResource;
    default: return kExitBadInput;
  }
}

std::string real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}

json manifest(std::string_view command, const std::string& config_text, const std::vector<std::string>& deviations) {
  json m;
  m["command"] = command;
  m["manifest_version"] = kManifestVersion;
  m["formats"] = {{"mps", 1}, {"circuit", 1}, {"report", kReportVersion}, {"csv", 1}};
  m["config_hash"] = "fnv1a:" + hex(fnv1a(config_text));
  m["config"] = config_text;
  m["deviations"] = deviations;
  return m;
}

MatrixProductState input_state(const RunConfig& config) {
  if (!config.input.empty()) return load_mps(config.input);
  return random_mps(config.state);
}

json report_json(const RunConfig& config, const LearnResult& result, const ComplexVector& psi) {
  const auto& c = result.circuit;
  const auto& r = result.report;
  json j;
  j["report_version"] = kReportVersion;
  j["variant"] = to_string(c.meta.variant);
  j["n"] = c.n;
  j["d"] = c.d;
  j["D"] = c.meta.D;
  j["p"] = c.p;
  j["M"] = c.depth();
  j["trivial"] = c.trivial;
  j["epsilon"] = c.meta.epsilon;
  j["epsilon_used"] = c.meta.epsilon_used;
  j["delta"] = c.meta.delta;
  j["eta"] = c.meta.eta;
  j["tau"] = c.meta.tau;
  j["oracle"] = {{"mode", to_string(c.meta.oracle.kind)},
                 {"eta", c.meta.oracle.eta ? json(*c.meta.oracle.eta) : json(nullptr)},
                 {"copies", c.meta.oracle.copies},
                 {"seed", c.meta.oracle.seed}};
  j["seed"] = c.meta.seed;
  j["mixture"] = config.mixture;
  j["final_fidelity"] = r.final_fidelity;
  j["copies_used"] = r.copies_used;
  j["final_copies"] = r.final_copies;
  j["final_success_mass"] = r.final_success_mass;
  j["final_trace_distance"] = r.final_trace_distance;
  json layers = json::array();
  for (const auto& layer : r.per_layer) {
    json blocks = json::array();
    for (const auto& b : layer.blocks) {
      blocks.push_back({{"i", b.i},
                        {"support", b.support},
                        {"projected", b.projected},
                        {"success_mass", b.success_mass},
                        {"trace_distance", b.trace_distance},
                        {"leakage", b.leakage},
                        {"selected", b.selected},
                        {"copies", b.copies}});
    }
    layers.push_back({{"j", layer.j},
                      {"success_mass", layer.success_mass},
                      {"fidelity_drop_bound", layer.fidelity_drop_bound},
                      {"blocks", blocks}});
  }
  j["per_layer"] = layers;
  if (result.audit) {
    json fidelity = json::array();
    json min_eig = json::array();
    for (int k = 0; k <= c.depth(); ++k) {
      const auto rho = stepwise_state(c, result.audit, k);
      fidelity.push_back(rho.expectation(psi));
      if (k > 0) min_eig.push_back(min_eigenvalue_difference(stepwise_state(c, result.audit, k - 1).factor, rho.factor));
    }
    j["audit"] = {{"input_fidelity_by_layer", fidelity}, {"min_eig_difference_by_layer", min_eig}};
  }
  j["deviations"] = r.deviations;
  return j;
}

int cmd_gen(const RunConfig& config, const std::string& out) {
  const auto mps = random_mps(config.state);
  save_mps(out, mps);
  const std::string config_text = canonical_text(config);
  write_text(out + ".manifest.json", manifest("gen", config_text, {}).dump(2) + "\n");
  std::cout << "wrote " << out << " (n=" << mps.n << ", d=" << mps.d << ", max bond " << mps.max_bond() << ")\n";
  std::cout << "cut ranks:";
  for (int cut = 1; cut < mps.n; ++cut) std::cout << ' ' << schmidt_rank(mps, cut, 1e-10);
  std::cout << '\n';
  return kExitOk;
}

int cmd_learn(const RunConfig& config) {
  const MatrixProductState mps = input_state(config);
  const ComplexVector psi = expand(mps);
  const int n = mps.n;
  const int d = mps.d;
  std::optional<QuantumStateBackend> backend;
  if (config.mixture > 0.0) {
    if (config.mixture > 1.0) throw Error(ErrorCode::BadParameter, "mixture must lie in [0, 1]");
    const Index dim = psi.size();
    const ComplexMatrix rho = (1.0 - config.mixture) * psi * psi.adjoint() +
                              config.mixture / static_cast<double>(dim) * ComplexMatrix::Identity(dim, dim);
    backend = QuantumStateBackend::mixed(rho, d, n);
  } else {
    backend = QuantumStateBackend::pure(psi, d, n);
  }
  const LearnResult result = learn(*backend, config.learn, config.oracle);

  const fs::path dir(config.out);
  fs::create_directories(dir);
  save_circuit((dir / "circuit.txt").string(), result.circuit);
  write_text(dir / "report.json", report_json(config, result, psi).dump(2) + "\n");
  const std::string config_text = canonical_text(config);
  write_text(dir / "manifest.json", manifest("learn", config_text, result.report.deviations).dump(2) + "\n");

  const fs::path csv = dir / "runs.csv";
  const bool fresh = !fs::exists(csv);
  std::ofstream rows(csv, std::ios::app | std::ios::binary);
  if (fresh) rows << "seed,n,d,D,epsilon,mode,variant,fidelity,copies\n";
  rows << config.learn.seed << ',' << n << ',' << d << ',' << config.learn.D << ','
       << real(config.learn.epsilon) << ',' << to_string(config.oracle.kind) << ',' << to_string(config.learn.variant)
       << ',' << real(result.report.final_fidelity) << ',' << result.report.copies_used << '\n';

  std::cout << "fidelity " << real(result.report.final_fidelity) << ", copies " << result.report.copies_used
            << ", p " << result.circuit.p << ", depth " << result.circuit.depth() << '\n';
  for (const auto& dev : result.report.deviations) std::cout << "deviation: " << dev << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
  bool ok = true;
  for (const auto& result : run_suite(suite, seed)) {
    for (const auto& prop : result.properties) {
      std::cout << (prop.passed ? "PASS " : "FAIL ") << result.suite << ": " << prop.name << " (" << prop.detail
                << ")\n";
    }
    ok = ok && result.passed();
  }
  return ok ? kExitOk : kExitProperty;
}

struct BudgetGrid {
  std::vector<int> ns{64, 128, 256, 512, 1024};
  std::vector<double> eps{0.05, 0.1, 0.2};
  std::vector<int> ds{2};
  std::vector<int> Ds{2};
  double delta = 0.1;
};

int cmd_budget(const BudgetGrid& grid, const std::string& out) {
  for (int n : grid.ns)
    if (n < 1) throw Error(ErrorCode::BadParameter, "grid values of n must be positive");
  std::ostringstream csv;
  csv << "formula,n,d,D,epsilon,delta,value\n";
  for (Formula f : kAllFormulas)
    for (int d : grid.ds)
      for (int D : grid.Ds) {
        if (f == Formula::ExactOurs && D < 2) continue;
        for (int n : grid.ns)
          for (double eps : grid.eps) {
            const BudgetInputs in{n, d, D, eps, grid.delta, 1.0};
            csv << to_string(f) << ',' << n << ',' << d << ',' << D << ',' << real(eps) << ',' << real(grid.delta)
                << ',' << real(evaluate(f, in)) << '\n';
          }
      }
  csv << "# slopes\n";
  csv << "formula,variable,d,D,fixed,slope,raw_slope\n";
  for (Formula f : kAllFormulas)
    for (int d : grid.ds)
      for (int D : grid.Ds) {
        if (f == Formula::ExactOurs && D < 2) continue;
        if (grid.ns.size() >= 2) {
          for (double eps : grid.eps) {
            const BudgetInputs base{grid.ns.front(), d, D, eps, grid.delta, 1.0};
            csv << to_string(f) << ",n," << d << ',' << D << ",epsilon=" << real(eps) << ','
                << real(n_slope(f, base, grid.ns)) << ',' << real(n_slope(f, base, grid.ns, false)) << '\n';
          }
        }
        if (grid.eps.size() >= 2) {
          for (int n : grid.ns) {
            const BudgetInputs base{n, d, D, grid.eps.front(), grid.delta, 1.0};
            const double s = epsilon_slope(f, base, grid.eps);
            csv << to_string(f) << ",1/epsilon," << d << ',' << D << ",n=" << n << ',' << real(s) << ',' << real(s)
                << '\n';
          }
        }
      }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(out, csv.str());
    std::ostringstream cfg;
    cfg << "delta = " << real(grid.delta) << '\n';
    auto list = [&](const char* key, const auto& values) {
      cfg << key << " =";
      for (const auto& v : values) cfg << ' ' << v;
      cfg << '\n';
    };
    list("n", grid.ns);
    list("epsilon", grid.eps);
    list("d", grid.ds);
    list("D", grid.Ds);
    write_text(out + ".manifest.json", manifest("budget", cfg.str(), {}).dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn matrix product states with logarithmic-depth disentangling circuits"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> mode;
  bool audit = false;

  auto* gen = app.add_subcommand("gen", "Generate an MPS instance");
  StateSpec spec_override{8, 2, 2, Boundary::Open, 1, StateKind::Random};
  std::string boundary = "open";
  std::string kind = "random";
  gen->add_option("--config", config_path, "Config file (key = value)");
  gen->add_option("--n", spec_override.n, "Number of sites");
  gen->add_option("--d", spec_override.d, "Local dimension");
  gen->add_option("--D", spec_override.D, "Bond dimension");
  gen->add_option("--boundary", boundary, "open or periodic");
  gen->add_option("--kind", kind, "random, ghz, product or w");
  gen->add_option("--seed", seed, "Instance seed");
  std::string gen_out = "state.mps";
  gen->add_option("--out", gen_out, "Output MPS file")->capture_default_str();

  auto* learn_cmd = app.add_subcommand("learn", "Run the learner on a state");
  std::string input;
  learn_cmd->add_option("--config", config_path, "Config file (key = value)");
  learn_cmd->add_option("--seed", seed, "Learner seed");
  learn_cmd->add_option("--out", out, "Output directory");
  learn_cmd->add_option("--mode", mode, "Oracle mode")->check(CLI::IsMember({"exact", "noise", "sample"}));
  learn_cmd->add_flag("--audit", audit, "Keep per-layer snapshots and report audit checks");
  learn_cmd->add_option("--input", input, "MPS file to learn");

  auto* verify = app.add_subcommand("verify", "Run a property suite");
  std::string suite;
  verify->add_option("suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"rank", "eckart-young", "monotonicity", "layer-bounds", "lambert", "plan", "dominance",
                             "all"}));
  verify->add_option("--seed", seed, "Suite seed");

  auto* budget = app.add_subcommand("budget", "Tabulate sample-complexity formulas");
  BudgetGrid grid;
  budget->add_option("--n", grid.ns, "Comma-separated n values")->delimiter(',')->check(CLI::PositiveNumber);
  budget->add_option("--eps", grid.eps, "Comma-separated epsilon values")->delimiter(',')->check(CLI::Range(1e-12, 1.0));
  budget->add_option("--d", grid.ds, "Comma-separated local dimensions")->delimiter(',')->check(CLI::Range(2, 64));
  budget->add_option("--D", grid.Ds, "Comma-separated bond dimensions")->delimiter(',')->check(CLI::Range(1, 64));
  budget->add_option("--delta", grid.delta, "Failure probability")->check(CLI::Range(1e-12, 1.0));
  budget->add_option("--out", out, "Output CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (gen->parsed()) {
      RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
      if (gen->count("--n")) config.state.n = spec_override.n;
      if (gen->count("--d")) config.state.d = spec_override.d;
      if (gen->count("--D")) config.state.D = spec_override.D;
      if (gen->count("--boundary")) config.state.boundary = parse_boundary(boundary);
      if (gen->count("--kind")) config.state.kind = parse_state_kind(kind);
      if (seed) config.state.seed = *seed;
      config.learn.D = config.state.D;
      return cmd_gen(config, gen_out);
    }
    if (learn_cmd->parsed()) {
      RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
      if (seed) config.learn.seed = *seed;
      if (!out.empty()) config.out = out;
      if (mode) config.oracle.kind = parse_oracle_kind(*mode);
      if (audit) config.learn.audit = true;
      if (!input.empty()) config.input = input;
      return cmd_learn(config);
    }
    if (verify->parsed()) return cmd_verify(suite, seed.value_or(1));
    if (budget->parsed()) return cmd_budget(grid, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}
