#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "retroimg/error.hpp"
#include "retroimg/hilbert.hpp"
#include "retroimg/predict.hpp"
#include "retroimg/scenario.hpp"

namespace retroimg {

namespace {

constexpr double kOracleTolerance = 1e-8;
constexpr double kNormTolerance = 1e-12;
constexpr double kBayesTolerance = 1e-12;

double max_abs_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

void check_scenario(const BuiltinScenario& sc, bool fast, std::vector<VerifyCheck>& out) {
  ScenarioConfig cfg = parse_config(sc.config);
  if (fast) cfg.n /= 2;
  const ImagingSetup setup = build_setup(cfg);
  const JointDistribution joint = predict_joint(setup);
  const std::vector<double> positions = {-1.0, -0.5, 0.0, 0.5, 1.0};
  const auto retro = sweep_conditioning(setup, positions);

  double worst_gap = 0.0;
  double worst_norm = 0.0;
  for (std::size_t p = 0; p < positions.size(); ++p) {
    const auto oracle = conditional_from_joint(joint, positions[p]);
    worst_gap = std::max(worst_gap, max_abs_gap(retro[p].distribution.density, oracle.density));
    worst_norm = std::max(worst_norm, std::abs(retro[p].distribution.total() - 1.0));
  }
  std::ostringstream where;
  where << "n = " << cfg.n << ", x1 in {-1, -0.5, 0, 0.5, 1}";
  out.push_back({sc.name + ": retrodictive vs predictive+Bayes", worst_gap, kOracleTolerance,
                 worst_gap <= kOracleTolerance, where.str()});
  out.push_back({sc.name + ": conditional normalisation", worst_norm, kNormTolerance,
                 worst_norm <= kNormTolerance, where.str()});
}

void check_hilbert(bool fast, std::vector<VerifyCheck>& out) {
  using namespace hilbert;
  const std::size_t instances = fast ? 100 : 400;
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<std::size_t> dim_dist(2, 6);
  std::uniform_int_distribution<std::size_t> count_dist(2, 5);
  double worst = 0.0;
  std::size_t skipped = 0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const std::size_t dim = dim_dist(rng);
    const std::size_t members = count_dist(rng);
    const std::size_t outcomes = std::min<std::size_t>(count_dist(rng), 2 * dim);
    std::vector<DensityOperator> states;
    for (std::size_t i = 0; i < members; ++i) states.push_back(random_density_operator(dim, rng));
    const Ensemble ens(random_priors(members, rng), std::move(states));
    const PomSet pom = random_pom(dim, outcomes, rng);
    const UnitaryEvolution u(haar_unitary(dim, rng), 1.0);

    const Eigen::MatrixXd bayes = bayes_invert(ens.priors(), predictive_matrix(ens, pom, u));
    for (std::size_t j = 0; j < outcomes; ++j) {
      std::vector<double> retro;
      try {
        retro = retrodictive_conditional(ens, pom, j, u);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DarkConditional) throw;
        ++skipped;
        continue;
      }
      for (std::size_t i = 0; i < members; ++i)
        worst = std::max(worst, std::abs(retro[i] - bayes(static_cast<Eigen::Index>(i),
                                                          static_cast<Eigen::Index>(j))));
    }
  }
  std::ostringstream detail;
  detail << instances << " seeded instances, dim 2..6";
  if (skipped) detail << ", " << skipped << " dark outcomes skipped";
  out.push_back({"finite-dimensional retrodiction vs Bayes", worst, kBayesTolerance,
                 worst <= kBayesTolerance, detail.str()});
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

std::string VerifyReport::format() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  max error " << fmt(c.value)
        << " (tolerance " << fmt(c.tolerance) << ")";
    if (!c.detail.empty()) out << "  [" << c.detail << "]";
    out << '\n';
  }
  const auto failed = std::count_if(checks.begin(), checks.end(),
                                    [](const VerifyCheck& c) { return !c.passed; });
  out << (failed ? "verification FAILED: " : "verification passed: ") << checks.size() - failed
      << "/" << checks.size() << " checks\n";
  return out.str();
}

VerifyReport run_verify(bool fast) {
  const auto start = std::chrono::steady_clock::now();
  VerifyReport report;
  for (const auto& sc : builtin_scenarios()) check_scenario(sc, fast, report.checks);
  check_hilbert(fast, report.checks);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace retroimg
