#include <iostream>
#include <string>
#include <vector>

#include "dantools/cli.h"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  const std::vector<std::string> args(argv, argv + argc);
  return dantools::cli::Run(args, std::cin, std::cout, std::cerr);
}
