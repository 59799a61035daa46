#include <iostream>

#include "attnfiqa/cli.hpp"

int main(int argc, char** argv) {
  return attnfiqa::cli::run(argc, argv, std::cout, std::cerr);
}
