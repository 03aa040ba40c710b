#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace porosplit {

/// Compressed-row sparse matrix. After assembly the column indices are sorted
/// and unique per row and explicit zeros are pruned.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;
using Vector = Eigen::VectorXd;

/// Build a finalized matrix from (row, col, value) contributions; duplicates sum.
inline SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols,
                                  const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(0.0);
  m.makeCompressed();
  return m;
}

inline SparseMatrix diagonal_matrix(const Vector& d) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  return from_triplets(d.size(), d.size(), t);
}

}  // namespace porosplit
