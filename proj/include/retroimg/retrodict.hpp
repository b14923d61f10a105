#pragma once

#include <optional>
#include <span>
#include <vector>

#include "retroimg/elements.hpp"
#include "retroimg/grid.hpp"
#include "retroimg/source.hpp"

namespace retroimg {

inline constexpr double kDarkThreshold = 1e-300;
inline constexpr double kDefaultEdgeLeakageLimit = 1e-6;

/// Two-arm imaging system.
///
/// `arm1` is listed from the arm-1 detector towards the crystal, i.e. the
/// order in which the retrodictive state meets the elements. `arm2` is listed
/// from the crystal towards the arm-2 detector.
struct ImagingSetup {
  TransverseGrid grid;
  std::vector<Element> arm1;
  std::vector<Element> arm2;
  BiphotonField source;
  DetectorProfile detector1;
  /// Maximum edge_leakage() tolerated at every stage; <= 0 disables the guard.
  double edge_leakage_limit = kDefaultEdgeLeakageLimit;
};

/// Normalised density over x2 (sum density * dx = 1).
struct ConditionalDistribution {
  TransverseGrid grid;
  std::vector<double> density;
  /// Arm-1 detector centre; empty for marginals.
  std::optional<double> conditioning_position;

  double total() const;
};

/// Fields along the unfolded system: detector mode, before the mask, after
/// the mask, at the crystal, conditioned arm-2 state, at the arm-2 detector.
/// With no mask in arm 1, alpha1 and alpha2 both equal the field at the crystal.
struct RetrodictiveStages {
  Field alpha;
  Field alpha1;
  Field alpha2;
  Field alpha3;
  Field beta1;
  Field beta2;
};

struct RetrodictiveResult {
  ConditionalDistribution distribution;
  RetrodictiveStages stages;
};

/// Checks that all elements and the source share the setup grid.
void validate_setup(const ImagingSetup& setup);

/// detector mode -> backward through arm 1 -> condition on the source ->
/// forward through arm 2 -> |beta2|^2 normalised.
///
/// Throws Error(DarkConditional) when sum |beta2|^2 dx < 1e-300 and
/// Error(Validation) when a stage exceeds the edge-leakage limit.
RetrodictiveResult run_retrodictive(const ImagingSetup& setup);

/// Runs the pipeline once per detector centre. Positions must lie in the
/// central 80% of the window. Results keep the input order. Failures are
/// collected and rethrown together, naming each position.
std::vector<RetrodictiveResult> sweep_conditioning(const ImagingSetup& setup,
                                                   std::span<const double> positions,
                                                   unsigned max_threads = 0);

}  // namespace retroimg
