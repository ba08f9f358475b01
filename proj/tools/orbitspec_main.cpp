#include <iostream>
#include <string>
#include <vector>

#include "orbitspec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return orbitspec::run_cli(args, std::cout, std::cerr);
}
