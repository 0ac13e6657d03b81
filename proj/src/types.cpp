#include "oudiff/types.hpp"

namespace oudiff {

Eigen::Matrix2cd block_trace(const Matrix& m, int n) {
  if (n < 1 || m.rows() != 2 * n || m.cols() != 2 * n)
    throw std::invalid_argument("block_trace: matrix must be 2n x 2n");
  Eigen::Matrix2cd out;
  out(0, 0) = m.block(0, 0, n, n).trace();
  out(0, 1) = m.block(0, n, n, n).trace();
  out(1, 0) = m.block(n, 0, n, n).trace();
  out(1, 1) = m.block(n, n, n, n).trace();
  return out;
}

}  // namespace oudiff
