#include <iostream>

#include "remaster/cli.hpp"

int main(int argc, char** argv) {
  return remaster::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
