#include <iostream>

#include "psrkit/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return psrkit::run_cli(args, std::cout, std::cerr);
}
