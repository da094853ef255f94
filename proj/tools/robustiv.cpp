#include <iostream>
#include <string>
#include <vector>

#include "robustiv/cli/run.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return robustiv::cli::run(args, std::cout, std::cerr);
}
