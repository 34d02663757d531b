#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace permorb::cli {

inline constexpr const char* kVersion = "permorb 0.1.0";

enum ExitCode : int {
  kOk = 0,
  kInvalid = 1,
  kIoError = 2,
  kBudgetExceeded = 3,
  kWitnessFound = 4,
  kInconclusive = 5,
  kReproduceMismatch = 6,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 5 x 5 grid for n, d in 2..6, indexed [n - 2][d - 2].
using Table5 = std::array<std::array<long, 5>, 5>;

/// Reference minimal nD guaranteeing separation, and maximal nD ruling it out.
const Table5& reference_minimal_table();
const Table5& reference_maximal_table();

struct CellMismatch {
  std::string table;
  int n = 0;
  int d = 0;
  long expected = 0;
  long actual = 0;
};

/// Regenerates both tables from the dimension formulas and lists the cells
/// that differ from `minimal` / `maximal`.
std::vector<CellMismatch> compare_tables(const Table5& minimal, const Table5& maximal);

}  // namespace permorb::cli
