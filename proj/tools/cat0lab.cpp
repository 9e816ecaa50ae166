#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cat0/experiments.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kInvariantViolation = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on group actions on CAT(0) model spaces"};
  std::string experiment, config_path, out_dir = "out";
  std::optional<int> ball, horizon, threads;
  app.add_option("experiment", experiment, "bowers-ruane | doubling-family | rigid-family | coxeter-family | conjecture-scan")
      ->required();
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--ball", ball, "ball radius L (overrides the config)");
  app.add_option("--horizon", horizon, "sequence length (overrides the config)");
  app.add_option("--out", out_dir, "output directory for JSON and CSV");
  app.add_option("--threads", threads, "worker threads for ball scans");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    cat0::Config cfg = config_path.empty() ? cat0::Config{} : cat0::Config::load(config_path);
    for (auto [key, value] : {std::pair{"ball", ball}, std::pair{"horizon", horizon}, std::pair{"threads", threads}}) {
      if (!value) continue;
      if (*value <= 0) throw cat0::ConfigError(std::string("--") + key + " must be positive");
      cfg.set(key, std::to_string(*value));
    }

    const cat0::Report rep = cat0::run_experiment(experiment, cfg);
    for (const auto& path : cat0::write_report(rep, out_dir)) std::cout << "wrote " << path << "\n";
    std::cout << rep.experiment << ": " << rep.seconds << " s";
    if (rep.invariant_violation) {
      std::cout << ", invariant violation\n";
      return kInvariantViolation;
    }
    std::cout << "\n";
    return 0;
  } catch (const cat0::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
