#include <string>
#include <vector>

#include "renact/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return renact::harness::run(args);
}
