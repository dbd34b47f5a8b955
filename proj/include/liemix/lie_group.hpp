#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "liemix/lie_factor.hpp"
#include "liemix/linalg.hpp"

namespace liemix {

class GroupElement;

/// Coordinates of a Lie-algebra element in R^p. The owning group is implied
/// by the call site; every Group operation checks the length.
using TangentVector = Vector;

/**
 * Descriptor of a matrix Lie group: a single factor or a direct product of
 * factors. Cheap to copy (shared immutable state).
 *
 * Tangent coordinates of a product are the factor coordinates concatenated
 * in factor order; every operator acts blockwise.
 */
class Group {
public:
    static Group so2();
    static Group se2();
    static Group euclidean(int n);
    static Group from_factor(FactorPtr factor);
    /// Direct product; nested products are flattened.
    static Group product(std::span<const Group> factors);
    static Group product(std::initializer_list<Group> factors);
    /// Inverse of name(): "SE2", "SO2", "R3", "SE2xR3", ...
    static Group parse(std::string_view name);

    int algebra_dim() const;
    int matrix_dim() const;
    int param_dim() const;
    std::string name() const;
    bool is_product() const;
    bool is_commutative() const;
    std::size_t num_factors() const;
    Group factor(std::size_t i) const;
    int factor_algebra_offset(std::size_t i) const;
    int factor_param_offset(std::size_t i) const;

    bool operator==(const Group& other) const;
    bool operator!=(const Group& other) const { return !(*this == other); }

    GroupElement identity() const;
    GroupElement compose(const GroupElement& a, const GroupElement& b) const;
    GroupElement inverse(const GroupElement& a) const;
    GroupElement exp(const TangentVector& x) const;
    /// Throws SingularLogError outside the injectivity radius.
    TangentVector log(const GroupElement& g) const;

    Eigen::MatrixXd hat(const TangentVector& x) const;
    TangentVector vee(const Eigen::MatrixXd& m) const;
    Eigen::MatrixXd matrix(const GroupElement& g) const;
    GroupElement from_matrix(const Eigen::MatrixXd& m, double tol = 1e-9) const;
    GroupElement from_params(const ParamVector& params) const;

    Matrix adjoint(const GroupElement& g) const;
    Matrix ad(const TangentVector& x) const;
    /// phi_G(x) = sum_n B_n ad(x)^n / n!
    Matrix phi_jacobian(const TangentVector& x) const;
    /// Phi_G(x) = phi_G(x)^{-1}
    Matrix phi_inv_jacobian(const TangentVector& x) const;

    /// ||log(a * b^{-1})||
    double distance(const GroupElement& a, const GroupElement& b) const;

private:
    struct Impl;
    explicit Group(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    static std::shared_ptr<const Impl> make_impl(std::vector<FactorPtr> factors);
    void check_tangent(const TangentVector& x, const char* what) const;
    void check_element(const GroupElement& g, const char* what) const;

    std::shared_ptr<const Impl> impl_;
};

/// A point on a group, stored as its parameter vector (see LieFactor).
class GroupElement {
public:
    GroupElement(Group group, ParamVector params);

    const Group& group() const { return group_; }
    const ParamVector& params() const { return params_; }
    Eigen::MatrixXd matrix() const { return group_.matrix(*this); }

    GroupElement inverse() const { return group_.inverse(*this); }
    GroupElement operator*(const GroupElement& rhs) const { return group_.compose(*this, rhs); }

    bool operator==(const GroupElement& other) const {
        return group_ == other.group_ && params_ == other.params_;
    }

private:
    Group group_;
    ParamVector params_;
};

/// Free-function spellings of the group operations.
inline GroupElement exp_g(const Group& g, const TangentVector& x) { return g.exp(x); }
inline TangentVector log_g(const GroupElement& x) { return x.group().log(x); }
inline GroupElement compose(const GroupElement& a, const GroupElement& b) { return a.group().compose(a, b); }
inline GroupElement inverse(const GroupElement& a) { return a.group().inverse(a); }
inline Matrix adjoint(const GroupElement& a) { return a.group().adjoint(a); }
inline Group product_group(std::initializer_list<Group> factors) { return Group::product(factors); }

}  // namespace liemix
