#include <iostream>

#include "randev/cli.h"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return randev::cli::Run(argc, argv, std::cin, std::cout, std::cerr);
}
