#pragma once

#include <Eigen/Dense>

#include "nlslab/grid.hpp"

namespace nlslab {

enum class MatrixKind { GeneratorMinus, Heat, Green, GreenPsi, GreenPsiStar, Jumping };

/// Symmetric grid-indexed matrix storing a kernel density. All kinds share
/// the weight convention: the operator acts as (A f)_i = sum_j A_ij f_j w_j,
/// i.e. products and applications insert the diagonal weight matrix W.
struct OperatorMatrix {
    MatrixKind kind = MatrixKind::GeneratorMinus;
    Eigen::MatrixXd entries;
    double time = 0.0;  // meaningful for Heat only

    int size() const { return static_cast<int>(entries.rows()); }
};

/// Weighted application (A f)_i = sum_j A_ij f_j w_j.
inline Eigen::VectorXd apply(const OperatorMatrix& A, const Grid& grid,
                             const Eigen::VectorXd& f) {
    Eigen::VectorXd wf = f;
    for (int j = 0; j < grid.n; ++j) wf[j] *= grid.weights[j];
    return A.entries * wf;
}

/// Weighted composition A W B of two kernel matrices on the same grid.
inline Eigen::MatrixXd compose(const OperatorMatrix& A, const Grid& grid,
                               const OperatorMatrix& B) {
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(grid.weights.data(), grid.n);
    return A.entries * w.asDiagonal() * B.entries;
}

}  // namespace nlslab
