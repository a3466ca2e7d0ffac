#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pbrp: planarly branched rough paths, Hopf checks and Ito formula verification"};
  app.require_subcommand(1);

  pbrp::app::RunOptions opt;
  std::string config;
  const std::map<std::string, std::string> about = {
      {"hopf-selftest", "exact coproduct, duality and primitivity checks"},
      {"lift", "build rough paths on a grid and check Chen and character residuals"},
      {"integrate", "rough integral of F(X) over a dyadic mesh ladder"},
      {"rde", "step-N Euler solution of dY = f(Y) dX"},
      {"ito", "Ito formula residuals and convergence orders"},
      {"dump", "write coproduct, star, rough path and controlled path tables"}};
  for (const auto& name : pbrp::app::command_names()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config, "JSON config file or bundled config name");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
  }
  // flags before the subcommand are accepted too
  app.add_option("--config", config, "JSON config file or bundled config name");
  app.add_option("--out", opt.out, "output directory");
  app.add_option("--jobs", opt.jobs, "worker threads")->check(CLI::Range(1, 256));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pbrp::app::kConfigInvalid;
  }
  if (!config.empty()) opt.config = config;
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return pbrp::app::run_command(command, opt, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pbrp::app::kIoFailure;
  }
}
