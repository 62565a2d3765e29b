#include "cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return tnrisk::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
