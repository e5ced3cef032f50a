// Contiguous storage for stacks of equally sized per-element matrices,
// plus a small deterministic parallel loop helper.

#ifndef HDG_BATCH_HPP
#define HDG_BATCH_HPP

#include <Eigen/Dense>
#include <functional>
#include <thread>
#include <vector>

namespace hdg {

// rows x cols x count array, one column-major matrix per slice.
struct Batch3 {
  int rows = 0, cols = 0, count = 0;
  Eigen::VectorXd data;

  Batch3() = default;
  Batch3(int r, int c, int n)
      : rows(r), cols(c), count(n),
        data(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r) * c * n)) {}

  Eigen::Map<Eigen::MatrixXd> slice(int k) {
    return {data.data() + static_cast<Eigen::Index>(rows) * cols * k, rows, cols};
  }
  Eigen::Map<const Eigen::MatrixXd> slice(int k) const {
    return {data.data() + static_cast<Eigen::Index>(rows) * cols * k, rows, cols};
  }

  // View of the whole batch as a (rows*cols) x count matrix; column k is vec(slice k).
  Eigen::Map<Eigen::MatrixXd> flat() {
    return {data.data(), static_cast<Eigen::Index>(rows) * cols, count};
  }
  Eigen::Map<const Eigen::MatrixXd> flat() const {
    return {data.data(), static_cast<Eigen::Index>(rows) * cols, count};
  }
};

// Runs fn(begin, end) on disjoint chunks of [0, n). Each index is processed
// exactly once; outputs written per-index are identical for any thread count.
inline void parallel_for(int n, int nthreads, const std::function<void(int, int)>& fn) {
  if (n <= 0) return;
  nthreads = std::max(1, std::min(nthreads, n));
  if (nthreads == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const int chunk = (n + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const int b = t * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back(fn, b, e);
  }
  for (auto& th : pool) th.join();
}

}  // namespace hdg

#endif
