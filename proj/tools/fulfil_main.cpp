#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Supply-chain planning copilot"};
  app.require_subcommand(1);
  fulfil::cli::setup_serve(*app.add_subcommand("serve", "run the HTTP service"));
  fulfil::cli::setup_gen(*app.add_subcommand("gen", "generate a labelled query dataset"));
  fulfil::cli::setup_eval(*app.add_subcommand("eval", "score backends and render reports"));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
