#include <iostream>

#include "nashbnb/cli.hpp"

int main(int argc, char** argv) {
  return nashbnb::cli::run_main(argc, argv, std::cout, std::cerr);
}
