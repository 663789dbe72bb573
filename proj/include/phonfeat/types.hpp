#pragma once

#include <cstdint>
#include <Eigen/Core>

namespace phonfeat {

using Index = Eigen::Index;

// One binarized PF vector is a row of 0/1 cells; an utterance encodes to a
// row-major matrix with one row per segment.
using BitVector = Eigen::RowVector<std::uint8_t, Eigen::Dynamic>;
using BitMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using EmbeddingVector = Eigen::VectorXd;
using EmbeddingMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline bool bits_equal(const BitVector& a, const BitVector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

inline bool bits_equal(const BitMatrix& a, const BitMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

}  // namespace phonfeat
