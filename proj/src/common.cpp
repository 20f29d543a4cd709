#include "aschern/common.hpp"

#include <Eigen/SVD>

#include <atomic>
#include <thread>

namespace aschern {

double op_norm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int nthreads = static_cast<int>(hw == 0 ? 1 : hw);
  if (nthreads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  nthreads = std::min(nthreads, n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace aschern
