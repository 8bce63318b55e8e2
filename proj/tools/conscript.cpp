#include "CLI11.hpp"

#include <fstream>
#include <iostream>

#include "conscript/scenario.hpp"

namespace {

using namespace conscript;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sim::ConfigValidationError({path + ": cannot open config file"});
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void emit(const Bytes& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout.write(reinterpret_cast<const char*>(report.data()),
                    static_cast<std::streamsize>(report.size()));
    std::cout << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error(out_path + ": cannot write report");
  out.write(reinterpret_cast<const char*>(report.data()),
            static_cast<std::streamsize>(report.size()));
}

sim::ScenarioConfig load_config(const std::string& path, uint64_t* seed_override) {
  sim::ScenarioConfig cfg = sim::validate_config(read_file(path));
  if (seed_override) cfg.seed = *seed_override;
  return cfg;
}

bool parse_toggle(const std::string& setting, participants::DefenseToggles& toggles,
                  std::string& problem) {
  auto eq = setting.find('=');
  if (eq == std::string::npos) {
    problem = "expected <toggle>=on|off";
    return false;
  }
  std::string name = setting.substr(0, eq);
  std::string value = setting.substr(eq + 1);
  bool on;
  if (value == "on")
    on = true;
  else if (value == "off")
    on = false;
  else {
    problem = "toggle value must be on or off";
    return false;
  }
  if (name == "canonicalization")
    toggles.canonicalization = on;
  else if (name == "digest-check" || name == "digest_check")
    toggles.digest_check = on;
  else if (name == "pregeneration")
    toggles.pregeneration = on;
  else if (name == "multi-server" || name == "multi_server")
    toggles.multi_server = on;
  else {
    problem = "unknown defense toggle: " + name;
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ConScript conscripted-anonymity simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, attack_kind;
  std::vector<std::string> defense_settings;
  uint64_t seed = 0, trials = 0, iterations = 100;
  bool have_seed = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "scenario config file")->required();
    sub->add_option("--out", out_path, "write the report to this path");
    sub->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
      have_seed = true;
    });
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run a scenario and report metrics");
  add_common(run_cmd);

  CLI::App* game_cmd = app.add_subcommand("game", "run the savvy-vs-casual distinguishing game");
  add_common(game_cmd);
  game_cmd->add_option("--trials", trials, "number of game trials");
  game_cmd->add_option("--defense", defense_settings, "defense toggle, e.g. canonicalization=off");

  CLI::App* attack_cmd = app.add_subcommand("attack", "run a scripted attack");
  attack_cmd->add_option("kind", attack_kind, "selective-dos or flood")->required();
  add_common(attack_cmd);

  CLI::App* bench_cmd = app.add_subcommand("bench", "time native dummy-message generation");
  add_common(bench_cmd);
  bench_cmd->add_option("--iterations", iterations, "iterations per workload (min 100)");

  CLI11_PARSE(app, argc, argv);

  try {
    uint64_t* seed_ptr = have_seed ? &seed : nullptr;

    if (run_cmd->parsed()) {
      auto cfg = load_config(config_path, seed_ptr);
      emit(sim::run_scenario(cfg).canonical_encode(), out_path);
      return kExitOk;
    }

    if (game_cmd->parsed()) {
      auto cfg = load_config(config_path, seed_ptr);
      if (!cfg.game)
        throw sim::ConfigValidationError({"game: section required for the game subcommand"});
      adversary::GameConfig game = *cfg.game;
      if (trials > 0) game.trials = trials;
      for (const auto& setting : defense_settings) {
        std::string problem;
        if (!parse_toggle(setting, game.toggles, problem))
          throw sim::ConfigValidationError({"--defense " + setting + ": " + problem});
      }
      DeterministicRng rng(cfg.seed);
      emit(adversary::run_distinguishing_game(game, rng).canonical_encode(), out_path);
      return kExitOk;
    }

    if (attack_cmd->parsed()) {
      auto cfg = load_config(config_path, seed_ptr);
      DeterministicRng rng(cfg.seed);
      if (attack_kind == "selective-dos") {
        adversary::SelectiveDosConfig dos;
        dos.scenario.group = cfg.group;
        dos.scenario.mix_layers = cfg.servers;
        dos.scenario.background_casual = cfg.casual;
        dos.scenario.round_duration = cfg.round_duration;
        dos.scenario.target_payload = cfg.payload_for(0);
        dos.target_savvy = cfg.attack.target_savvy;
        emit(adversary::run_selective_dos(dos, cfg.attack.multi_server, rng).canonical_encode(),
             out_path);
        return kExitOk;
      }
      if (attack_kind == "flood") {
        adversary::FloodPopulation population{cfg.savvy, cfg.casual, cfg.registered};
        emit(adversary::run_flood_attack(cfg.policy, cfg.attack.sybils, population, cfg.group,
                                         rng)
                 .canonical_encode(),
             out_path);
        return kExitOk;
      }
      throw sim::ConfigValidationError({"attack: kind must be selective-dos or flood"});
    }

    if (bench_cmd->parsed()) {
      load_config(config_path, seed_ptr);  // validated for errors, seed unused
      emit(sim::run_bench(iterations).canonical_encode(), out_path);
      return kExitOk;
    }
  } catch (const sim::ConfigValidationError& e) {
    for (const auto& problem : e.problems()) std::cerr << "config error: " << problem << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
