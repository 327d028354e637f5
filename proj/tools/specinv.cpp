#include "specinv/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  specinv::cli::tune_allocator();
  std::vector<std::string> args(argv, argv + argc);
  return specinv::cli::run(args, std::cout, std::cerr);
}
