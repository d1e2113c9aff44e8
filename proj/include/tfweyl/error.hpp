#pragma once

#include <stdexcept>
#include <string>

namespace tfweyl {

enum class errc {
  dimension_mismatch,
  space_tag_mismatch,
  grid_mismatch,
  off_lattice,
  zero_window,
  degenerate_pair,
  non_square_grid,
  lattice_incompatible,
  memory_budget_exceeded,
  inconclusive_grid,
  boundary_attained,
  convergence_failure,
  invalid_argument,
  io_error,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::space_tag_mismatch: return "SpaceTagMismatch";
    case errc::grid_mismatch: return "GridMismatch";
    case errc::off_lattice: return "OffLattice";
    case errc::zero_window: return "ZeroWindow";
    case errc::degenerate_pair: return "DegeneratePair";
    case errc::non_square_grid: return "NonSquareGrid";
    case errc::lattice_incompatible: return "LatticeIncompatible";
    case errc::memory_budget_exceeded: return "MemoryBudgetExceeded";
    case errc::inconclusive_grid: return "InconclusiveGrid";
    case errc::boundary_attained: return "BoundaryAttained";
    case errc::convergence_failure: return "ConvergenceFailure";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::io_error: return "IOError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace tfweyl
