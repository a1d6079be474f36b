#include <iostream>
#include <string>
#include <vector>

#include "knnloo/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return knnloo::cli::run(args, std::cout, std::cerr);
}
