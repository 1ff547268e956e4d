#include <analoglab/harness.hpp>

#include <iostream>

int main(int argc, char** argv) {
  return analoglab::harness::run_cli(argc, argv, std::cout, std::cerr);
}
