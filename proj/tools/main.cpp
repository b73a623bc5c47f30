#include <iostream>
#include <string>
#include <vector>

#include "loca/cli/commands.hpp"

int main(int argc, char **argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return loca::cli::run_cli(args, std::cout, std::cerr);
}
