#include <iostream>

#include "stlab/selftest.hpp"

int main() {
  int failures = stlab::run_acceptance_suite(std::cout);
  if (failures != 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
