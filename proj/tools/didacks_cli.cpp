#include <iostream>

#include "CLI11.hpp"
#include "cli_commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Minimum-energy harmonic interpolation in half-spaces"};
  app.require_subcommand(1);
  didacks::cli::Options opt;
  std::uint64_t seed = 0;
  double tolerance = 0.0;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"fit-rn", "Dirichlet-norm point-source fit in R^n"},
      {"fit-surface", "surface-norm point-source fit in R^n"},
      {"fit-cx", "pole / log-pair fit in the upper half-plane"},
      {"rbf-convert", "inverse-multiquadric interpolation as a half-space fit"},
      {"downcont", "synthetic survey, spectral model and downward continuation"},
      {"oracle-check", "closed forms against quadrature oracles"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON config file");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--tolerance", tolerance, "check tolerance")->check(CLI::PositiveNumber);
    if (name == "oracle-check") {
      sub->add_option("--suite", opt.suite, "check suite")
          ->check(CLI::IsMember({"all", "dirichlet", "surface", "complex"}))
          ->capture_default_str();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return didacks::cli::usage;
  }

  auto* sub = app.get_subcommands().front();
  if (sub->count("--seed") > 0) {
    opt.seed = seed;
  }
  if (sub->count("--tolerance") > 0) {
    opt.tolerance = tolerance;
  }
  const int code = didacks::cli::run(sub->get_name(), opt, std::cerr);
  if (code == didacks::cli::ok || code == didacks::cli::tolerance) {
    std::cout << "wrote " << opt.out << "/report.json\n";
  }
  return code;
}
