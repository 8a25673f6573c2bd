#include <iostream>
#include <string>
#include <vector>

#include "recallm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return recallm::run_cli(args, std::cin, std::cout, std::cerr);
}
