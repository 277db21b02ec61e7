#include <iostream>

#include "flexirank/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return flexirank::run_cli(args, std::cout, std::cerr);
}
