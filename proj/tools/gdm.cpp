#include <iostream>
#include <string>
#include <vector>

#include "gdm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gdm::run_cli(args, std::cout, std::cerr);
}
