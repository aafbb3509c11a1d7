#include <string>
#include <vector>

#include "iftrace/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return iftrace::cli_main(args);
}
