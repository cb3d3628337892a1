#pragma once

#include <stdexcept>

namespace wasse {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- case parsing ---------------------------------------------------------
class MalformedSection : public Error { public: using Error::Error; };
class DanglingBranch : public Error { public: using Error::Error; };
class NonPositiveBase : public Error { public: using Error::Error; };
class UnsupportedTransformer : public Error { public: using Error::Error; };
class NoSuchBranch : public Error { public: using Error::Error; };

// --- partitioning ----------------------------------------------------------
class UnassignedBus : public Error { public: using Error::Error; };
class EmptyRegion : public Error { public: using Error::Error; };
class NoSuchRegion : public Error { public: using Error::Error; };

// --- numerics --------------------------------------------------------------
class NotPositiveDefinite : public Error { public: using Error::Error; };
class CholeskyFailure : public Error { public: using Error::Error; };
class DegenerateSpread : public Error { public: using Error::Error; };
class DofUnderflow : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class SingularInnovation : public Error { public: using Error::Error; };
class SingularFusedInformation : public Error { public: using Error::Error; };

// --- configuration / experiments --------------------------------------------
class ConfigError : public Error { public: using Error::Error; };
class ExperimentError : public Error { public: using Error::Error; };

}  // namespace wasse
