#include <iostream>

#include "continuized/harness.hpp"

int main(int argc, char** argv) {
  return continuized::harness::main_entry(argc, argv, std::cout, std::cerr);
}
