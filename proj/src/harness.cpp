#include "phrl/harness.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phrl {

using nlohmann::json;

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::RiverSwim:
      return "riverswim";
    case EnvKind::JdpHard:
      return "jdp-hard";
    case EnvKind::LdpHard:
      return "ldp-hard";
    case EnvKind::MabHard:
      return "mab-hard";
  }
  return "?";
}

EnvKind parse_env_kind(const std::string& name) {
  if (name == "riverswim") return EnvKind::RiverSwim;
  if (name == "jdp-hard") return EnvKind::JdpHard;
  if (name == "ldp-hard") return EnvKind::LdpHard;
  if (name == "mab-hard") return EnvKind::MabHard;
  throw ConfigError("env: unknown environment '" + name + "'");
}

namespace {

// Re-throws builder and parser complaints as config errors.
template <class F>
auto as_config_error(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (episodes == 0) throw ConfigError("episodes: must be at least 1");
  if (seeds == 0) throw ConfigError("seeds: must be at least 1");
  if (horizon && *horizon == 0) throw ConfigError("horizon: must be at least 1");
  if (!(agent.epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
  if (agent.privacy != PrivacyModel::None && !std::isfinite(agent.epsilon)) {
    throw ConfigError("epsilon: must be finite for private models");
  }
  if (!(agent.delta > 0.0 && agent.delta <= 1.0)) throw ConfigError("delta: must lie in (0, 1]");
  if (!(agent.bonus_scale >= 0.0 && std::isfinite(agent.bonus_scale))) {
    throw ConfigError("bonus_scale: must be finite and non-negative");
  }
  if (agent.eta && !(*agent.eta >= 0.0 && std::isfinite(*agent.eta))) {
    throw ConfigError("eta: must be finite and non-negative");
  }
  as_config_error([&] {
    resolved_heavy(*this).validate();
    return 0;
  });
}

HeavyTailParams resolved_heavy(const ExperimentConfig& c) {
  HeavyTailParams h = c.env.kind == EnvKind::RiverSwim ? c.env.riverswim.heavy
                                                       : HeavyTailParams{1.0, 1.0, 1.0};
  if (c.v) h.v = *c.v;
  if (c.u) h.u = *c.u;
  if (c.tau) h.tau = *c.tau;
  return h;
}

MdpSpec build_environment(const ExperimentConfig& c) {
  const HeavyTailParams heavy = resolved_heavy(c);
  auto check_horizon = [&](const MdpSpec& mdp) {
    if (c.horizon && *c.horizon != mdp.horizon()) {
      throw ConfigError("horizon: " + to_string(c.env.kind) + " has a fixed horizon of " +
                        std::to_string(mdp.horizon()));
    }
    return mdp;
  };
  return as_config_error([&]() -> MdpSpec {
    switch (c.env.kind) {
      case EnvKind::RiverSwim: {
        RiverSwimParams p = c.env.riverswim;
        p.heavy = heavy;
        if (c.horizon) p.horizon = *c.horizon;
        return build_riverswim(p);
      }
      case EnvKind::JdpHard: {
        JdpHardParams p = c.env.jdp;
        p.v = heavy.v;
        return check_horizon(build_jdp_hard(p));
      }
      case EnvKind::LdpHard: {
        LdpHardParams p = c.env.ldp;
        p.v = heavy.v;
        return check_horizon(build_ldp_hard(p));
      }
      case EnvKind::MabHard: {
        MabHardParams p = c.env.mab;
        p.v = heavy.v;
        return check_horizon(mab_as_mdp(build_mab_hard(p)));
      }
    }
    throw ConfigError("env: unhandled kind");
  });
}

AgentConfig resolved_agent(const ExperimentConfig& c) {
  AgentConfig a = c.agent;
  a.heavy = resolved_heavy(c);
  return a;
}

namespace {

template <class T>
void read(const json& doc, const char* key, T& target) {
  if (!doc.contains(key)) return;
  try {
    target = doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

template <class T>
void read_optional(const json& doc, const char* key, std::optional<T>& target) {
  if (!doc.contains(key)) return;
  if (doc.at(key).is_null()) {
    target.reset();
    return;
  }
  T value{};
  read(doc, key, value);
  target = value;
}

void reject_unknown(const json& doc, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& item : doc.items()) {
    bool found = false;
    for (const char* k : known) found = found || item.key() == k;
    if (!found) throw ConfigError(where + item.key() + ": unknown key");
  }
}

void read_env_params(const json& doc, EnvironmentSpec& env) {
  if (!doc.is_object()) throw ConfigError("env_params: expected an object");
  switch (env.kind) {
    case EnvKind::RiverSwim: {
      auto& p = env.riverswim;
      reject_unknown(doc,
                     {"alpha", "sigma", "start_advance", "start_stay", "mid_advance", "mid_stay",
                      "mid_retreat", "end_stay", "end_retreat"},
                     "env_params.");
      read(doc, "alpha", p.alpha);
      read(doc, "sigma", p.sigma);
      read(doc, "start_advance", p.start_advance);
      read(doc, "start_stay", p.start_stay);
      read(doc, "mid_advance", p.mid_advance);
      read(doc, "mid_stay", p.mid_stay);
      read(doc, "mid_retreat", p.mid_retreat);
      read(doc, "end_stay", p.end_stay);
      read(doc, "end_retreat", p.end_retreat);
      break;
    }
    case EnvKind::JdpHard:
      reject_unknown(doc, {"n", "m", "gamma", "optimal"}, "env_params.");
      read(doc, "n", env.jdp.n);
      read(doc, "m", env.jdp.m);
      read(doc, "gamma", env.jdp.gamma);
      read(doc, "optimal", env.jdp.optimal);
      break;
    case EnvKind::LdpHard:
      reject_unknown(doc, {"S", "A", "gamma", "optimal"}, "env_params.");
      read(doc, "S", env.ldp.S);
      read(doc, "A", env.ldp.A);
      read(doc, "gamma", env.ldp.gamma);
      read_optional(doc, "optimal", env.ldp.optimal);
      break;
    case EnvKind::MabHard:
      reject_unknown(doc, {"A", "gap", "best", "raised"}, "env_params.");
      read(doc, "A", env.mab.A);
      read(doc, "gap", env.mab.gap);
      read(doc, "best", env.mab.best);
      read_optional(doc, "raised", env.mab.raised);
      break;
  }
}

}  // namespace

ExperimentConfig experiment_from_json(const json& doc, ExperimentConfig c) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(doc,
                 {"env", "agent", "privacy", "epsilon", "delta", "episodes", "horizon", "v", "u",
                  "tau", "seeds", "base_seed", "out", "zero_noise", "bonus_scale", "eta", "sign",
                  "gamma", "gap", "env_params"},
                 "");
  std::string name;
  if (doc.contains("env")) {
    read(doc, "env", name);
    c.env.kind = parse_env_kind(name);
  }
  if (doc.contains("agent")) {
    read(doc, "agent", name);
    c.agent.kind = as_config_error([&] { return parse_agent_kind(name); });
  }
  if (doc.contains("privacy")) {
    read(doc, "privacy", name);
    c.agent.privacy = as_config_error([&] { return parse_privacy_model(name); });
  }
  if (doc.contains("sign")) {
    read(doc, "sign", name);
    c.agent.sign = as_config_error([&] { return parse_update_sign(name); });
  }
  read(doc, "epsilon", c.agent.epsilon);
  read(doc, "delta", c.agent.delta);
  read(doc, "bonus_scale", c.agent.bonus_scale);
  read_optional(doc, "eta", c.agent.eta);
  read(doc, "episodes", c.episodes);
  read_optional(doc, "horizon", c.horizon);
  read_optional(doc, "v", c.v);
  read_optional(doc, "u", c.u);
  read_optional(doc, "tau", c.tau);
  read(doc, "seeds", c.seeds);
  read(doc, "base_seed", c.base_seed);
  read(doc, "out", c.out);
  read(doc, "zero_noise", c.zero_noise);
  if (doc.contains("gamma")) {
    double g = 0.0;
    read(doc, "gamma", g);
    c.env.jdp.gamma = g;
    c.env.ldp.gamma = g;
  }
  read(doc, "gap", c.env.mab.gap);
  if (doc.contains("env_params")) read_env_params(doc.at("env_params"), c.env);
  return c;
}

json experiment_to_json(const ExperimentConfig& c) {
  json doc;
  doc["env"] = to_string(c.env.kind);
  doc["agent"] = to_string(c.agent.kind);
  doc["privacy"] = to_string(c.agent.privacy);
  doc["sign"] = to_string(c.agent.sign);
  doc["epsilon"] = c.agent.epsilon;
  doc["delta"] = c.agent.delta;
  doc["bonus_scale"] = c.agent.bonus_scale;
  doc["eta"] = c.agent.eta ? json(*c.agent.eta) : json(nullptr);
  doc["episodes"] = c.episodes;
  doc["horizon"] = c.horizon ? json(*c.horizon) : json(nullptr);
  const HeavyTailParams heavy = resolved_heavy(c);
  doc["v"] = heavy.v;
  doc["u"] = heavy.u;
  doc["tau"] = heavy.tau;
  doc["seeds"] = c.seeds;
  doc["base_seed"] = c.base_seed;
  doc["zero_noise"] = c.zero_noise;
  json env;
  switch (c.env.kind) {
    case EnvKind::RiverSwim: {
      const auto& p = c.env.riverswim;
      env = {{"alpha", p.alpha},
             {"sigma", p.sigma},
             {"start_advance", p.start_advance},
             {"start_stay", p.start_stay},
             {"mid_advance", p.mid_advance},
             {"mid_stay", p.mid_stay},
             {"mid_retreat", p.mid_retreat},
             {"end_stay", p.end_stay},
             {"end_retreat", p.end_retreat}};
      break;
    }
    case EnvKind::JdpHard:
      env = {{"n", c.env.jdp.n},
             {"m", c.env.jdp.m},
             {"gamma", c.env.jdp.gamma},
             {"optimal", c.env.jdp.optimal}};
      break;
    case EnvKind::LdpHard:
      env = {{"S", c.env.ldp.S}, {"A", c.env.ldp.A}, {"gamma", c.env.ldp.gamma}};
      env["optimal"] = c.env.ldp.optimal ? json(*c.env.ldp.optimal) : json(nullptr);
      break;
    case EnvKind::MabHard:
      env = {{"A", c.env.mab.A}, {"gap", c.env.mab.gap}, {"best", c.env.mab.best}};
      env["raised"] = c.env.mab.raised ? json(*c.env.mab.raised) : json(nullptr);
      break;
  }
  doc["env_params"] = env;
  if (!c.out.empty()) doc["out"] = c.out;
  return doc;
}

std::string config_digest(const ExperimentConfig& config) {
  json doc = experiment_to_json(config);
  doc.erase("out");
  doc.erase("seeds");
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RegretRecord run_single(const ExperimentConfig& config, const MdpSpec& env,
                        const ValueTables& optimal, std::size_t index) {
  RandomStream rng(derive_seed(config.base_seed, index));
  std::unique_ptr<NoiseSource> noise;
  if (config.zero_noise) {
    noise = std::make_unique<ZeroNoise>();
  } else {
    noise = std::make_unique<LaplaceNoise>();
  }
  Agent agent(resolved_agent(config), env.num_states(), env.num_actions(), env.horizon(),
              config.episodes, std::move(noise));

  RegretRecord record;
  record.seed = config.base_seed + index;
  record.config_digest = config_digest(config);
  record.per_episode.reserve(config.episodes);
  record.cumulative.reserve(config.episodes);
  double total = 0.0;
  for (std::size_t k = 0; k < config.episodes; ++k) {
    const EpisodeOutcome out = agent.run_episode(env, rng);
    const double r = per_episode_regret(env, out.policy, optimal);
    total += r;
    record.per_episode.push_back(r);
    record.cumulative.push_back(total);
  }
  return record;
}

void aggregate(AggregateResult& result) {
  const std::size_t n = result.records.size();
  if (n == 0) throw std::logic_error("aggregate: no records");
  const std::size_t K = result.records.front().cumulative.size();
  for (const auto& r : result.records) {
    if (r.cumulative.size() != K) throw std::logic_error("aggregate: records differ in length");
  }
  result.mean_cumulative.assign(K, 0.0);
  result.std_cumulative.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    double mean = 0.0;
    for (const auto& r : result.records) mean += r.cumulative[k];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& r : result.records) var += (r.cumulative[k] - mean) * (r.cumulative[k] - mean);
    result.mean_cumulative[k] = mean;
    result.std_cumulative[k] = std::sqrt(var / static_cast<double>(n));
  }
}

AggregateResult run_experiment(const ExperimentConfig& config, Execution exec) {
  config.validate();
  const MdpSpec env = build_environment(config);
  as_config_error([&] {
    Agent probe(resolved_agent(config), env.num_states(), env.num_actions(), env.horizon(),
                config.episodes);
    return 0;
  });
  const ValueTables optimal = exact_optimal_values(env, Execution::Serial);

  AggregateResult result;
  result.config = config;
  result.records.resize(config.seeds);

  const bool parallel = exec == Execution::Parallel ||
                        (exec == Execution::Auto && config.seeds > 1 && kernels::max_threads() > 1);
  if (parallel) {
    std::exception_ptr failure;
    const auto n = static_cast<long long>(config.seeds);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
      try {
        result.records[static_cast<std::size_t>(i)] =
            run_single(config, env, optimal, static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(phrl_run_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::size_t i = 0; i < config.seeds; ++i) {
      result.records[i] = run_single(config, env, optimal, i);
    }
  }
  aggregate(result);
  return result;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_csv(const AggregateResult& result, std::ostream& out) {
  const auto& agent = result.config.agent;
  const std::string algorithm = to_string(agent.kind);
  const std::string privacy = to_string(agent.privacy);
  const std::string epsilon =
      agent.privacy == PrivacyModel::None ? "inf" : format_number(agent.epsilon);
  out << "seed,episode,cumulative_regret,algorithm,privacy,epsilon\n";
  for (const auto& record : result.records) {
    for (std::size_t k = 0; k < record.cumulative.size(); ++k) {
      out << record.seed << ',' << (k + 1) << ',' << format_number(record.cumulative[k]) << ','
          << algorithm << ',' << privacy << ',' << epsilon << '\n';
    }
  }
}

void write_csv(const AggregateResult& result, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  write_csv(result, file);
  file.flush();
  if (!file) throw std::runtime_error("csv: write to '" + path + "' failed");
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Simulate private heavy-tailed episodic RL agents and write regret curves as CSV."};
  app.set_version_flag("--version", "phrl 1.0.0");

  ExperimentConfig config;
  std::string env_name = "riverswim";
  std::string agent_name = "vi";
  std::string privacy_name = "none";
  std::string sign_name = "ascent";
  std::string config_path;
  std::size_t horizon = 0;
  double v = 0.0, u = 0.0, tau = 0.0, eta = 0.0, gamma = 0.0;
  bool serial = false;

  app.add_option("--env", env_name, "riverswim | jdp-hard | ldp-hard | mab-hard")
      ->capture_default_str();
  app.add_option("--agent", agent_name, "vi | po")->capture_default_str();
  app.add_option("--privacy", privacy_name, "none | jdp | ldp")->capture_default_str();
  app.add_option("--epsilon", config.agent.epsilon, "Privacy budget")->capture_default_str();
  app.add_option("--delta", config.agent.delta, "Confidence level")->capture_default_str();
  app.add_option("--episodes", config.episodes, "Episodes per run (K)")->capture_default_str();
  auto* horizon_opt = app.add_option("--horizon", horizon, "Episode length (RiverSwim only)");
  auto* v_opt = app.add_option("--v", v, "Moment order parameter, E|X|^{1+v} <= u");
  auto* u_opt = app.add_option("--u", u, "Moment bound");
  auto* tau_opt = app.add_option("--tau", tau, "Mean bound");
  app.add_option("--seeds", config.seeds, "Independent runs")->capture_default_str();
  app.add_option("--base-seed", config.base_seed, "Seed of run 0")->capture_default_str();
  app.add_option("--out", config.out, "CSV output path");
  app.add_option("--config", config_path, "JSON config; its keys override the flags");
  app.add_flag("--zero-noise", config.zero_noise, "Test only: privatizers add no noise");
  app.add_option("--bonus-scale", config.agent.bonus_scale, "Multiplier on every bonus")
      ->capture_default_str();
  auto* eta_opt = app.add_option("--eta", eta, "Policy-optimisation step size");
  app.add_option("--sign", sign_name, "Policy step direction: ascent | printed")
      ->capture_default_str();
  auto* gamma_opt = app.add_option("--gamma", gamma, "Hard-instance gamma (jdp-hard, ldp-hard)");
  app.add_option("--gap", config.env.mab.gap, "Bandit gap (mab-hard)")->capture_default_str();
  app.add_flag("--serial", serial, "Run seeds one after another");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    config.env.kind = parse_env_kind(env_name);
    config.agent.kind = as_config_error([&] { return parse_agent_kind(agent_name); });
    config.agent.privacy = as_config_error([&] { return parse_privacy_model(privacy_name); });
    config.agent.sign = as_config_error([&] { return parse_update_sign(sign_name); });
    if (horizon_opt->count()) config.horizon = horizon;
    if (v_opt->count()) config.v = v;
    if (u_opt->count()) config.u = u;
    if (tau_opt->count()) config.tau = tau;
    if (eta_opt->count()) config.agent.eta = eta;
    if (gamma_opt->count()) {
      config.env.jdp.gamma = gamma;
      config.env.ldp.gamma = gamma;
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("config: cannot read '" + config_path + "'");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError("config: '" + config_path + "' is not valid JSON: " + e.what());
      }
      config = experiment_from_json(doc, config);
    }
    if (config.out.empty()) throw ConfigError("out: an output path is required");
    config.validate();
    build_environment(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    const AggregateResult result =
        run_experiment(config, serial ? Execution::Serial : Execution::Auto);
    write_csv(result, config.out);
    std::cout << "wrote " << result.records.size() * config.episodes << " rows to " << config.out
              << " (final mean cumulative regret " << format_number(result.mean_cumulative.back())
              << ")\n";
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace phrl
