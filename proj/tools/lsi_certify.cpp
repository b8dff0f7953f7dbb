#include <iostream>

#include <CLI11.hpp>

#include "lsi/error.hpp"
#include "lsi/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical log-Sobolev certification on gridded Gibbs measures"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  app.add_option("command", command, "certify | flow | converse | harnack | spectrum | oracle | corpus")
      ->required();
  app.add_option("config", config_path, "key = value configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--seed", seed, "seed for randomized checks (overrides seed)")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : lsi::exit_config_error;
  }

  try {
    const auto cmd = lsi::parse_command(command);
    auto cfg = lsi::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    const auto result = lsi::run(cmd, cfg);
    const auto& report = result.report;
    std::cout << command << ": " << report.value("status", std::string("?"));
    if (report.contains("error")) std::cout << " (" << report["error"].get<std::string>() << ")";
    std::cout << "\nreport: " << (cfg.output_dir / "report.json").string() << "\n";
    return result.exit_code;
  } catch (const lsi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lsi::exit_config_error;
  }
}
