#include <iostream>
#include <string>
#include <vector>

#include "hdual/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hdual::run_cli(args, std::cout, std::cerr);
}
