#include "agrotrack/errors.hpp"

namespace agrotrack {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::singular_speed: return "singular_speed";
    case ErrorKind::integration_blowup: return "integration_blowup";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::empty_grid: return "empty_grid";
    case ErrorKind::shape: return "shape";
    case ErrorKind::grid_type: return "grid_type";
    case ErrorKind::ill_posed: return "ill_posed";
    case ErrorKind::extraction_failed: return "extraction_failed";
    case ErrorKind::structure: return "structure";
    case ErrorKind::simulation_unstable: return "simulation_unstable";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace agrotrack
