#include <iostream>

#include "hornindex/cli_app.hpp"

int main(int argc, char** argv) {
  return hornindex::cli::run_cli(argc, argv, std::cout, std::cerr);
}
