#include <iostream>
#include <string>
#include <vector>

#include "iadmm/runner.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return iadmm::cli_main(args, std::cout, std::cerr);
}
