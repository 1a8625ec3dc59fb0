#include <iostream>
#include <string>
#include <vector>

#include "outage/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return outage::cli::run(args, std::cout, std::cerr);
}
