#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phrl/agents.hpp"
#include "phrl/environments.hpp"
#include "phrl/kernels.hpp"
#include "phrl/mdp.hpp"

namespace phrl {

/// Raised for anything wrong with an experiment configuration. The message
/// starts with the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class EnvKind { RiverSwim, JdpHard, LdpHard, MabHard };

std::string to_string(EnvKind kind);
/// "riverswim", "jdp-hard", "ldp-hard", "mab-hard".
EnvKind parse_env_kind(const std::string& name);

struct EnvironmentSpec {
  EnvKind kind = EnvKind::RiverSwim;
  RiverSwimParams riverswim;
  JdpHardParams jdp;
  LdpHardParams ldp;
  MabHardParams mab;
};

struct ExperimentConfig {
  EnvironmentSpec env;
  /// `agent.heavy` is ignored; the declared bounds come from resolved_heavy().
  AgentConfig agent;
  std::size_t episodes = 1000;
  /// Only RiverSwim takes a horizon (default 20); the hard instances fix
  /// their own and reject a conflicting value.
  std::optional<std::size_t> horizon;
  std::optional<double> v;
  std::optional<double> u;
  std::optional<double> tau;
  std::size_t seeds = 1;
  std::uint64_t base_seed = 0;
  std::string out;
  /// Test-only: privatizers add no noise.
  bool zero_noise = false;

  /// Throws ConfigError. Does not check `out`.
  void validate() const;
};

/// Declared moment bounds used by both the environment and the agent:
/// RiverSwim defaults to (v, u, tau) = (1, 3, 1), the hard instances to
/// (v, 1, 1) with v their construction parameter.
HeavyTailParams resolved_heavy(const ExperimentConfig& config);

/// The environment the config describes, with the resolved bounds and
/// horizon applied.
MdpSpec build_environment(const ExperimentConfig& config);

/// Agent configuration with the resolved bounds filled in.
AgentConfig resolved_agent(const ExperimentConfig& config);

/// Applies the keys of a config document on top of `base`. Unknown keys
/// are rejected.
ExperimentConfig experiment_from_json(const nlohmann::json& doc, ExperimentConfig base = {});
nlohmann::json experiment_to_json(const ExperimentConfig& config);

/// Short stable hash of the config document.
std::string config_digest(const ExperimentConfig& config);

struct AggregateResult {
  ExperimentConfig config;
  std::vector<double> mean_cumulative;
  /// Population standard deviation over seeds.
  std::vector<double> std_cumulative;
  std::vector<RegretRecord> records;
};

/// Regret trajectory of run `index` (seeded from derive_seed(base_seed,
/// index)) on a prebuilt environment.
RegretRecord run_single(const ExperimentConfig& config, const MdpSpec& env,
                        const ValueTables& optimal, std::size_t index);

/// One agent run per seed. `Parallel` distributes seeds over OpenMP threads,
/// `Serial` runs them in order; both give identical results.
AggregateResult run_experiment(const ExperimentConfig& config,
                               Execution exec = Execution::Auto);

/// Mean and population standard deviation of the cumulative curves.
void aggregate(AggregateResult& result);

/// Writes `seed,episode,cumulative_regret,algorithm,privacy,epsilon` rows,
/// episodes 1-indexed, numbers with 10 significant digits. The epsilon
/// column reads "inf" for the non-private model.
void write_csv(const AggregateResult& result, std::ostream& out);
void write_csv(const AggregateResult& result, const std::string& path);

/// Number formatting used by write_csv.
std::string format_number(double x);

/// Command-line entry point. Returns 0 on success, 2 on a usage or config
/// error, 1 on a runtime error.
int cli_main(int argc, char** argv);

}  // namespace phrl
