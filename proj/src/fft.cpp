#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace retroimg::detail {

namespace {

// FFTW planning is not thread-safe but fftw_execute_dft is, so plans are
// created once per (n, sign) under a lock and shared. FFTW_UNALIGNED lets a
// plan run on any std::vector buffer.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find({n, sign});
    if (it != plans_.end()) return it->second;
    std::vector<fftw_complex> scratch(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, scratch.data(), scratch.data(), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(std::pair{n, sign}, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data, FftSign sign) {
  const int n = static_cast<int>(data.size());
  const int s = sign == FftSign::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(n, s), buf, buf);
}

}  // namespace retroimg::detail
