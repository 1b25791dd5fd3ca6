#include <iostream>
#include <string>
#include <vector>

#include "waylab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return waylab::run(args, std::cout, std::cerr).exit_code;
}
