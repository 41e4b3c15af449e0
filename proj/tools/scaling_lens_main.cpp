#include <iostream>
#include <string>
#include <vector>

#include "scaling_lens/cli/runner.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return scaling_lens::cli::run(args, std::cout, std::cerr);
}
