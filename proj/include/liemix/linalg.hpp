#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace liemix {

/// Upper bound on the tangent dimension of any group the library handles.
/// Vectors and matrices below are stack-allocated up to this size.
inline constexpr int kMaxAlgebraDim = 16;
/// Upper bound on the length of a group element's stored parameter vector.
inline constexpr int kMaxParamDim = 32;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAlgebraDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAlgebraDim, kMaxAlgebraDim>;
using ParamVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxParamDim, 1>;

using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;
using VecRef = Eigen::Ref<Eigen::VectorXd>;
using ConstMatRef = Eigen::Ref<const Eigen::MatrixXd>;
using MatRef = Eigen::Ref<Eigen::MatrixXd>;

/// (A + A^T) / 2
Matrix symmetrize(const Matrix& a);

/// Symmetrizes `cov`, adds `jitter * I` and factors it. Throws
/// NotPositiveDefiniteError when the factorization fails; `what` names the
/// operation for the message.
Eigen::LLT<Matrix> checked_cholesky(const Matrix& cov, const char* what, double jitter = 0.0);

/// log |A| from a Cholesky factor.
double log_det(const Eigen::LLT<Matrix>& llt);

/// max |A - A^T|
double asymmetry(const Matrix& a);

}  // namespace liemix
