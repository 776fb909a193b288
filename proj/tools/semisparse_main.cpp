#include <string>
#include <vector>

#include "semisparse/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return semisparse::run_cli(args);
}
