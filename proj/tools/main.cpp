#include <iostream>

#include "smd2cpn/cli.hpp"

int main(int argc, char** argv) {
  return smd2cpn::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
