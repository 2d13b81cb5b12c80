#include <string>
#include <vector>

#include "hood/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hood::cli::main_entry(args);
}
