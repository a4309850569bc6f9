#include <iostream>
#include <string>
#include <vector>

#include "ipp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ipp::run_command(args, std::cout, std::cerr);
}
