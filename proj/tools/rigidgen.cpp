#include <iostream>

#include "rigidgen/cli.hpp"

int main(int argc, char** argv)
{
  return rigidgen::cli::run(argc, argv, std::cout, std::cerr);
}
