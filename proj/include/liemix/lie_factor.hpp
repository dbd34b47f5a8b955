#pragma once

#include <memory>
#include <string>

#include "liemix/linalg.hpp"

namespace liemix {

/// Number of Bernoulli terms B_0..B_{N-1} kept by the series fallback for
/// the BCH Jacobian.
inline constexpr int kBernoulliTerms = 10;
/// The first omitted series term must stay below this norm.
inline constexpr double kSeriesTolerance = 1e-6;

struct SeriesResult {
    Matrix value;
    double tail_norm = 0.0;  // norm of the first omitted nonzero term
    bool converged = true;
};

/// phi(x) = sum_n B_n ad(x)^n / n!, truncated after `terms` terms.
SeriesResult bernoulli_series(const Matrix& ad_x, int terms = kBernoulliTerms);

/**
 * One irreducible matrix Lie group (SO(2), SE(2), R^n, ...).
 *
 * An element is stored as a compact parameter vector of length param_dim();
 * tangent vectors have length algebra_dim(). Every factor must provide the
 * group law, exp/log, hat/vee and both adjoint representations. The BCH
 * Jacobians default to the truncated Bernoulli series; factors with a known
 * closed form override them.
 *
 * Perturbations are left-sided throughout: X = exp(xi) * mu.
 */
class LieFactor {
public:
    virtual ~LieFactor() = default;

    virtual std::string name() const = 0;
    virtual int algebra_dim() const = 0;
    virtual int param_dim() const = 0;
    virtual int matrix_dim() const = 0;
    virtual bool is_commutative() const { return false; }

    virtual void identity(VecRef g) const = 0;
    virtual void compose(ConstVecRef a, ConstVecRef b, VecRef out) const = 0;
    virtual void inverse(ConstVecRef a, VecRef out) const = 0;
    virtual void exp(ConstVecRef x, VecRef g) const = 0;
    /// Throws SingularLogError outside the injectivity radius.
    virtual void log(ConstVecRef g, VecRef x) const = 0;

    virtual void hat(ConstVecRef x, MatRef m) const = 0;
    virtual void vee(ConstMatRef m, VecRef x) const = 0;
    virtual void to_matrix(ConstVecRef g, MatRef m) const = 0;
    /// Throws DimensionError when `m` is off the manifold by more than `tol`.
    virtual void from_matrix(ConstMatRef m, VecRef g, double tol) const = 0;

    virtual void adjoint(ConstVecRef g, MatRef out) const = 0;
    virtual void ad(ConstVecRef x, MatRef out) const = 0;

    /// phi_G(x); see bernoulli_series.
    virtual void phi(ConstVecRef x, MatRef out) const;
    /// Phi_G(x) = phi_G(x)^{-1}.
    virtual void phi_inv(ConstVecRef x, MatRef out) const;
};

using FactorPtr = std::shared_ptr<const LieFactor>;

/// Rotations of the plane. Tangent: [theta]. Parameters: [theta] in (-pi, pi].
class SO2Factor final : public LieFactor {
public:
    std::string name() const override { return "SO2"; }
    int algebra_dim() const override { return 1; }
    int param_dim() const override { return 1; }
    int matrix_dim() const override { return 2; }
    bool is_commutative() const override { return true; }

    void identity(VecRef g) const override;
    void compose(ConstVecRef a, ConstVecRef b, VecRef out) const override;
    void inverse(ConstVecRef a, VecRef out) const override;
    void exp(ConstVecRef x, VecRef g) const override;
    void log(ConstVecRef g, VecRef x) const override;
    void hat(ConstVecRef x, MatRef m) const override;
    void vee(ConstMatRef m, VecRef x) const override;
    void to_matrix(ConstVecRef g, MatRef m) const override;
    void from_matrix(ConstMatRef m, VecRef g, double tol) const override;
    void adjoint(ConstVecRef g, MatRef out) const override;
    void ad(ConstVecRef x, MatRef out) const override;
    void phi(ConstVecRef x, MatRef out) const override;
    void phi_inv(ConstVecRef x, MatRef out) const override;
};

/// Rigid motions of the plane.
/// Tangent: [rho_x, rho_y, theta]. Parameters: [t_x, t_y, theta], theta in (-pi, pi].
/// Matrix form: [[R(theta), t], [0 0 1]].
class SE2Factor final : public LieFactor {
public:
    std::string name() const override { return "SE2"; }
    int algebra_dim() const override { return 3; }
    int param_dim() const override { return 3; }
    int matrix_dim() const override { return 3; }

    void identity(VecRef g) const override;
    void compose(ConstVecRef a, ConstVecRef b, VecRef out) const override;
    void inverse(ConstVecRef a, VecRef out) const override;
    void exp(ConstVecRef x, VecRef g) const override;
    void log(ConstVecRef g, VecRef x) const override;
    void hat(ConstVecRef x, MatRef m) const override;
    void vee(ConstMatRef m, VecRef x) const override;
    void to_matrix(ConstVecRef g, MatRef m) const override;
    void from_matrix(ConstMatRef m, VecRef g, double tol) const override;
    void adjoint(ConstVecRef g, MatRef out) const override;
    void ad(ConstVecRef x, MatRef out) const override;
    void phi(ConstVecRef x, MatRef out) const override;
    void phi_inv(ConstVecRef x, MatRef out) const override;
};

/// R^n under addition. Elements are stored as plain vectors; the matrix form
/// is the homogeneous [[I, v], [0, 1]] of size n + 1.
class EuclideanFactor final : public LieFactor {
public:
    explicit EuclideanFactor(int n);

    std::string name() const override { return "R" + std::to_string(n_); }
    int algebra_dim() const override { return n_; }
    int param_dim() const override { return n_; }
    int matrix_dim() const override { return n_ + 1; }
    bool is_commutative() const override { return true; }

    void identity(VecRef g) const override;
    void compose(ConstVecRef a, ConstVecRef b, VecRef out) const override;
    void inverse(ConstVecRef a, VecRef out) const override;
    void exp(ConstVecRef x, VecRef g) const override;
    void log(ConstVecRef g, VecRef x) const override;
    void hat(ConstVecRef x, MatRef m) const override;
    void vee(ConstMatRef m, VecRef x) const override;
    void to_matrix(ConstVecRef g, MatRef m) const override;
    void from_matrix(ConstMatRef m, VecRef g, double tol) const override;
    void adjoint(ConstVecRef g, MatRef out) const override;
    void ad(ConstVecRef x, MatRef out) const override;
    void phi(ConstVecRef x, MatRef out) const override;
    void phi_inv(ConstVecRef x, MatRef out) const override;

private:
    int n_;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace liemix
