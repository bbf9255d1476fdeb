#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  rotnum::tools::RunConfig config;
  try {
    if (!rotnum::tools::parse_args(argc, argv, config, std::cout)) return 0;
  } catch (const rotnum::tools::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun 'rotnum --help' for the command list\n";
    return 1;
  }
  return rotnum::tools::run(config, std::cout, std::cerr);
}
