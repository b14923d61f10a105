#include "retroimg/retrodict.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "retroimg/error.hpp"

namespace retroimg {

namespace {

void guard_leakage(const Field& f, double limit, const char* stage) {
  if (limit <= 0.0) return;
  const double leak = edge_leakage(f);
  if (leak > limit) {
    std::ostringstream msg;
    msg << "stage " << stage << " puts a fraction " << leak
        << " of its weight in the outer 10% of the window (limit " << limit
        << "); widen the grid";
    fail(msg.str());
  }
}

void check_element_grid(const Element& e, const TransverseGrid& grid) {
  if (const auto* m = std::get_if<Mask>(&e)) require_same_grid(m->transfer.grid(), grid, "mask");
}

}  // namespace

double ConditionalDistribution::total() const {
  double acc = 0.0;
  for (double d : density) acc += d;
  return acc * grid.dx();
}

void validate_setup(const ImagingSetup& setup) {
  require_same_grid(setup.source.grid(), setup.grid, "source");
  for (const Element& e : setup.arm1) check_element_grid(e, setup.grid);
  for (const Element& e : setup.arm2) check_element_grid(e, setup.grid);
}

namespace {

RetrodictiveResult run_with_detector(const ImagingSetup& setup, const DetectorProfile& detector) {
  const double limit = setup.edge_leakage_limit;

  const Field alpha = materialize_detector(detector, setup.grid);
  guard_leakage(alpha, limit, "alpha");

  // Walk arm 1 from the detector to the crystal with adjoint actions.
  Field current = alpha;
  std::optional<Field> before_mask;
  std::optional<Field> after_mask;
  for (const Element& e : setup.arm1) {
    const bool is_mask = std::holds_alternative<Mask>(e);
    if (is_mask && !before_mask) before_mask = current;
    current = apply_backward(e, current);
    if (is_mask) after_mask = current;
    guard_leakage(current, limit, "arm 1");
  }
  Field alpha3 = current;
  Field alpha1 = before_mask.value_or(alpha3);
  Field alpha2 = after_mask.value_or(alpha3);

  Field beta1 = condition(setup.source, alpha3);
  guard_leakage(beta1, limit, "beta1");

  Field beta2 = beta1;
  for (const Element& e : setup.arm2) {
    beta2 = apply_forward(e, beta2);
    guard_leakage(beta2, limit, "arm 2");
  }

  const double weight = beta2.norm_squared();
  if (!(weight >= kDarkThreshold)) {
    std::ostringstream msg;
    msg << "dark conditional: arm-2 weight " << weight << " at x1 = " << detector.center
        << " (the conditioning event has zero probability)";
    throw Error(ErrorCode::DarkConditional, msg.str());
  }

  ConditionalDistribution dist{setup.grid, std::vector<double>(beta2.size()), detector.center};
  for (std::size_t i = 0; i < beta2.size(); ++i) dist.density[i] = std::norm(beta2[i]) / weight;

  return RetrodictiveResult{std::move(dist),
                            RetrodictiveStages{alpha, std::move(alpha1), std::move(alpha2),
                                               std::move(alpha3), std::move(beta1),
                                               std::move(beta2)}};
}

}  // namespace

RetrodictiveResult run_retrodictive(const ImagingSetup& setup) {
  validate_setup(setup);
  return run_with_detector(setup, setup.detector1);
}

std::vector<RetrodictiveResult> sweep_conditioning(const ImagingSetup& setup,
                                                   std::span<const double> positions,
                                                   unsigned max_threads) {
  validate_setup(setup);
  const double half_span = 0.4 * setup.grid.extent();
  for (double x1 : positions) {
    if (!(std::abs(x1) <= half_span)) {
      std::ostringstream msg;
      msg << "conditioning position " << x1 << " lies outside the central 80% of the window (|x1| <= "
          << half_span << ")";
      fail(msg.str());
    }
  }

  const std::size_t count = positions.size();
  std::vector<std::optional<RetrodictiveResult>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        DetectorProfile detector = setup.detector1;
        detector.center = positions[i];
        results[i] = run_with_detector(setup, detector);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  unsigned threads = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::ostringstream msg;
  bool any_error = false;
  bool all_dark = true;
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    any_error = true;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DarkConditional) all_dark = false;
      msg << "\n  x1 = " << positions[i] << ": " << e.what();
    } catch (const std::exception& e) {
      all_dark = false;
      msg << "\n  x1 = " << positions[i] << ": " << e.what();
    }
  }
  if (any_error) {
    throw Error(all_dark ? ErrorCode::DarkConditional : ErrorCode::Validation,
                "sweep failed at:" + msg.str());
  }

  std::vector<RetrodictiveResult> out;
  out.reserve(count);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

}  // namespace retroimg
