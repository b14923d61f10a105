#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retroimg/retrodict.hpp"

namespace retroimg {

enum class ScenarioKind { Fig3Direct, Fourier2f, Custom };
enum class DetectorKind { Gaussian, TopHat, Point };
enum class MaskKind { None, DoubleSlit, SingleSlit, GaussianAperture, Table };

struct MaskSpec {
  MaskKind kind = MaskKind::None;
  double width = 0.4;       // slit width
  double separation = 2.0;  // centre-to-centre, double slit
  double sigma = 1.0;       // gaussian aperture exp(-x^2 / (2 sigma^2))
  std::string file;         // table: lines "x, re[, im]"

  bool operator==(const MaskSpec&) const = default;
};

/// Flat `key = value` scenario description; see parse_config() for keys.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::Fig3Direct;
  std::size_t n = 512;
  double extent = 16.0;
  double k_z = 50.0;
  double focal_length = 2.0;
  double kappa = 4.0;
  bool fresnel_half_factor = false;
  DetectorKind detector = DetectorKind::Gaussian;
  double detector_sigma = 0.1;
  double detector_width = 1.0;
  double x1 = 0.0;
  std::vector<double> sweep;  // non-empty overrides x1
  MaskSpec mask;
  std::vector<std::string> arm1;  // custom only, detector to crystal
  std::vector<std::string> arm2;  // custom only, crystal to detector
  double edge_guard = kDefaultEdgeLeakageLimit;
  std::string output_dir = "out";
  bool write_stages = false;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses one `key = value` per line; `#` starts a comment. Keys:
///   scenario            fig3-direct | fourier-2f | custom
///   grid.n, grid.extent, k_z, f, kappa, fresnel_half_factor
///   detector.shape      gaussian | tophat | point
///   detector.sigma, detector.width, detector.x1
///   detector.sweep      comma-separated x1 list
///   mask                none | double-slit | single-slit | gaussian-aperture | table
///   mask.width, mask.separation, mask.sigma, mask.file
///   arm1, arm2          custom only: comma-separated propagate(z), fourier_lens,
///                       quadratic_phase(f), mask
///   edge_guard          leakage limit, 0 disables
///   output.dir, output.stages
/// Errors are Error(Validation) and name the offending line.
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::filesystem::path& path);

/// Emits every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// Transfer function for the configured mask; all ones for MaskKind::None.
Field build_mask(const MaskSpec& spec, const TransverseGrid& grid);

ImagingSetup build_setup(const ScenarioConfig& config);

/// Runs the configured sweep, or the single position x1.
std::vector<RetrodictiveResult> run_scenario(const ScenarioConfig& config);

/// Header `x2,probability_density`, one row per grid point, shortest
/// round-trip decimal representation.
void write_conditional_csv(std::ostream& out, const ConditionalDistribution& dist);
std::vector<std::pair<double, double>> read_conditional_csv(std::istream& in);

/// Magnitude and phase of every stage, plus the grid and x1.
std::string stages_json(const RetrodictiveResult& result);

/// Writes conditional.csv (or conditional_x1_<x1>.csv per sweep position) and,
/// when configured, the matching stages JSON. Returns the files written.
std::vector<std::filesystem::path> write_outputs(const ScenarioConfig& config,
                                                 const std::vector<RetrodictiveResult>& results,
                                                 const std::filesystem::path& out_dir);

struct BuiltinScenario {
  std::string name;
  std::string description;
  std::string config;
};

const std::vector<BuiltinScenario>& builtin_scenarios();

// Verification -----------------------------------------------------------------

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  double seconds = 0.0;

  bool passed() const;
  std::string format() const;
};

/// Oracle-equivalence suite: every built-in scenario against the predictive
/// joint, the finite-dimensional Bayes equivalence, and normalisation.
/// `fast` halves the grid and trims the random-instance count.
VerifyReport run_verify(bool fast);

}  // namespace retroimg
