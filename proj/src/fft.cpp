#include "levyop/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "levyop/errors.hpp"

namespace levyop {

namespace {

// Plans are created once per (n, N, sign) and executed with the new-array
// interface, which is thread-safe.  Planning itself is not, hence the mutex.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int points, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(n, points, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(points);
    std::vector<fftw_complex> a(total), b(total);
    std::vector<int> dims(n, points);
    fftw_plan plan = fftw_plan_dft(n, dims.data(), a.data(), b.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw ComputationError("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(int n, int points, int sign, std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != out.size()) throw ParameterError("dft: size mismatch");
  fftw_plan plan = cache().get(n, points, sign);
  // FFTW does not modify the input of an out-of-place complex transform.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  if (src == dst) {
    std::vector<cplx> tmp(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()), dst);
  } else {
    fftw_execute_dft(plan, src, dst);
  }
}

}  // namespace

void dft_forward(int n, int points, std::span<const cplx> in, std::span<cplx> out) {
  execute(n, points, FFTW_FORWARD, in, out);
}

void dft_inverse(int n, int points, std::span<const cplx> in, std::span<cplx> out) {
  execute(n, points, FFTW_BACKWARD, in, out);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
}

}  // namespace levyop
