#include "liemix/linalg.hpp"

#include <cmath>
#include <string>

#include "liemix/errors.hpp"

namespace liemix {

Matrix symmetrize(const Matrix& a) {
    Matrix s = 0.5 * (a + a.transpose());
    return s;
}

Eigen::LLT<Matrix> checked_cholesky(const Matrix& cov, const char* what, double jitter) {
    Matrix s = symmetrize(cov);
    if (jitter > 0.0) s.diagonal().array() += jitter;
    if (!s.allFinite())
        throw NotPositiveDefiniteError(std::string(what) + ": covariance has non-finite entries");
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefiniteError(std::string(what) + ": covariance is not positive-definite");
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i) > 0.0))
            throw NotPositiveDefiniteError(std::string(what) + ": covariance is singular");
    }
    return llt;
}

double log_det(const Eigen::LLT<Matrix>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double asymmetry(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace liemix
