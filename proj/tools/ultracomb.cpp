#include <iostream>

#include "cli.h"

int main(int argc, char** argv) {
  auto args = std::vector<std::string>(argv + 1, argv + argc);
  return ultracomb::cli::run(args, std::cout, std::cerr);
}
