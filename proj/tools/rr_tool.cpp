#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rr/app/runner.hpp"
#include "rr/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reeb-field Ricci curvature verification and realization"};
  std::string config, command, out;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config, "JSON run configuration")->required();
  app.add_option("--command", command, "verify | realize-local | realize-global | distance")
      ->required()
      ->check(CLI::IsMember(rr::app::command_names()));
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--seed", seed, "overrides the config seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rr::app::kExitInvalidInput;
  }

  rr::app::RunConfig cfg;
  try {
    cfg = rr::app::load_config(config);
  } catch (const rr::Error& e) {
    std::cerr << "rr_tool: " << e.what() << '\n';
    return rr::app::kExitInvalidInput;
  }
  if (seed) cfg.seed = *seed;

  const auto outcome = rr::app::run(command, cfg, out);
  if (!outcome.error.empty()) std::cerr << "rr_tool: " << outcome.error << '\n';
  for (const auto& f : outcome.files) std::cout << f.string() << '\n';
  return outcome.exit_code;
}
