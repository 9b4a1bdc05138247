// Writes one log per reference cohort into the given directory.
#include <iostream>

#include "reference_cohorts.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture_logs <directory>\n";
    return 2;
  }
  for (const auto& c : quadaudit::testing::reference_cohorts()) {
    std::cout << quadaudit::testing::write_log(c, argv[1]) << "\n";
  }
  return 0;
}
