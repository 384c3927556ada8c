#pragma once

#include <stdexcept>
#include <string>

namespace nlflux {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can catch one type and still report the specific cause.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonUniqueProjection : Error { using Error::Error; };
struct OutsideComputationalDomain : Error { using Error::Error; };
struct ContourLeavesNeumannRegion : Error { using Error::Error; };
struct InvalidHorizon : Error { using Error::Error; };
struct QuadratureNotConverged : Error { using Error::Error; };
struct InsufficientNeighbors : Error { using Error::Error; };
struct SingularNormalEquations : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct MissingBoundaryData : Error { using Error::Error; };
struct DegenerateCornerFrame : Error { using Error::Error; };
struct AssemblyFailure : Error { using Error::Error; };
struct RegionDecompositionFailure : Error { using Error::Error; };

}  // namespace nlflux
