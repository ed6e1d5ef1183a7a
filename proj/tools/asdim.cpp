#include <iostream>
#include <string>
#include <vector>

#include "asdim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return asdim::cli::run(args, std::cout, std::cerr);
}
