#include <iostream>
#include <string>
#include <vector>

#include "fpld/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fpld::cli::run(args, std::cout, std::cerr);
}
