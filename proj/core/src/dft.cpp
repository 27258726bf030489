#include "ddfmcw/dft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

namespace ddfmcw::dft {

namespace {

using Key = std::tuple<int, int, int, int, int>;

// FFTW planning is not thread safe; execution with new-array calls is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

  fftw_plan get(int n, int howmany, int stride, int dist, Sign sign) {
    const Key key{n, howmany, stride, dist, static_cast<int>(sign)};
    std::lock_guard lock(mu_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t span = static_cast<std::size_t>(howmany - 1) * dist +
                             static_cast<std::size_t>(n - 1) * stride + 1;
    std::vector<fftw_complex> scratch(span);
    fftw_plan p = fftw_plan_many_dft(1, &n, howmany, scratch.data(), nullptr, stride, dist,
                                     scratch.data(), nullptr, stride, dist,
                                     static_cast<int>(sign), FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void transform(cplx* data, int n, int howmany, int stride, int dist, Sign sign) {
  if (n <= 0 || howmany <= 0) return;
  fftw_plan p = cache().get(n, howmany, stride, dist, sign);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

void rows_forward(CMat& X) {
  const int M = static_cast<int>(X.rows()), N = static_cast<int>(X.cols());
  transform(X.data(), N, M, M, 1, Sign::forward);
  X *= 1.0 / std::sqrt(static_cast<double>(N));
}

void rows_backward(CMat& X) {
  const int M = static_cast<int>(X.rows()), N = static_cast<int>(X.cols());
  transform(X.data(), N, M, M, 1, Sign::backward);
  X *= 1.0 / std::sqrt(static_cast<double>(N));
}

void cols_forward(CMat& X) {
  const int M = static_cast<int>(X.rows()), N = static_cast<int>(X.cols());
  transform(X.data(), M, N, 1, M, Sign::forward);
  X *= 1.0 / std::sqrt(static_cast<double>(M));
}

void cols_backward(CMat& X) {
  const int M = static_cast<int>(X.rows()), N = static_cast<int>(X.cols());
  transform(X.data(), M, N, 1, M, Sign::backward);
  X *= 1.0 / std::sqrt(static_cast<double>(M));
}

}  // namespace ddfmcw::dft
