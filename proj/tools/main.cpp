#include <iostream>
#include <string>
#include <vector>

#include "sepdistill/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sepdistill::cli::execute_command(args, std::cout, std::cerr);
}
