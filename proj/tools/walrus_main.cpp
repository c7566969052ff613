#include <iostream>
#include <vector>

#include "walrus/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return walrus::run_cli(args, std::cout, std::cerr);
}
