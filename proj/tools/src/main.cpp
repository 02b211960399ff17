#include <iostream>

#include "cuspidal_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cuspidal::cli::run(args, std::cout, std::cerr);
}
