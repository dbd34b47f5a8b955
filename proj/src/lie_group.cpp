#include "liemix/lie_group.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "liemix/errors.hpp"

namespace liemix {

struct Group::Impl {
    std::vector<FactorPtr> factors;
    std::vector<int> alg_off, param_off, mat_off;
    int p = 0, params = 0, n = 0;
    std::string name;
    bool commutative = true;
};

std::shared_ptr<const Group::Impl> Group::make_impl(std::vector<FactorPtr> factors) {
    if (factors.empty()) throw DimensionError("group needs at least one factor");
    auto impl = std::make_shared<Group::Impl>();
    for (const auto& f : factors) {
        impl->alg_off.push_back(impl->p);
        impl->param_off.push_back(impl->params);
        impl->mat_off.push_back(impl->n);
        impl->p += f->algebra_dim();
        impl->params += f->param_dim();
        impl->n += f->matrix_dim();
        if (!impl->name.empty()) impl->name += "x";
        impl->name += f->name();
        impl->commutative = impl->commutative && f->is_commutative();
    }
    if (impl->p > kMaxAlgebraDim)
        throw DimensionError("group " + impl->name + " exceeds the maximum tangent dimension " +
                             std::to_string(kMaxAlgebraDim));
    if (impl->params > kMaxParamDim)
        throw DimensionError("group " + impl->name + " exceeds the maximum parameter length");
    impl->factors = std::move(factors);
    return impl;
}

Group Group::from_factor(FactorPtr factor) { return Group(make_impl({std::move(factor)})); }

Group Group::so2() {
    static const Group g = from_factor(std::make_shared<SO2Factor>());
    return g;
}

Group Group::se2() {
    static const Group g = from_factor(std::make_shared<SE2Factor>());
    return g;
}

Group Group::euclidean(int n) { return from_factor(std::make_shared<EuclideanFactor>(n)); }

Group Group::product(std::span<const Group> factors) {
    std::vector<FactorPtr> leaves;
    for (const auto& g : factors)
        leaves.insert(leaves.end(), g.impl_->factors.begin(), g.impl_->factors.end());
    return Group(make_impl(std::move(leaves)));
}

Group Group::product(std::initializer_list<Group> factors) {
    return product(std::span<const Group>(factors.begin(), factors.size()));
}

Group Group::parse(std::string_view name) {
    std::vector<Group> parts;
    std::size_t pos = 0;
    while (pos <= name.size()) {
        std::size_t end = name.find('x', pos);
        if (end == std::string_view::npos) end = name.size();
        std::string_view tok = name.substr(pos, end - pos);
        if (tok == "SE2") {
            parts.push_back(se2());
        } else if (tok == "SO2") {
            parts.push_back(so2());
        } else if (tok.size() > 1 && tok[0] == 'R') {
            int n = 0;
            auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), n);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || n < 1)
                throw ParseError("bad Euclidean factor '" + std::string(tok) + "'");
            parts.push_back(euclidean(n));
        } else {
            throw ParseError("unknown group factor '" + std::string(tok) + "'");
        }
        pos = end + 1;
    }
    if (parts.size() == 1) return parts.front();
    return product(parts);
}

int Group::algebra_dim() const { return impl_->p; }
int Group::matrix_dim() const { return impl_->n; }
int Group::param_dim() const { return impl_->params; }
std::string Group::name() const { return impl_->name; }
bool Group::is_product() const { return impl_->factors.size() > 1; }
bool Group::is_commutative() const { return impl_->commutative; }
std::size_t Group::num_factors() const { return impl_->factors.size(); }
Group Group::factor(std::size_t i) const { return from_factor(impl_->factors.at(i)); }
int Group::factor_algebra_offset(std::size_t i) const { return impl_->alg_off.at(i); }
int Group::factor_param_offset(std::size_t i) const { return impl_->param_off.at(i); }

bool Group::operator==(const Group& other) const {
    if (impl_ == other.impl_) return true;
    return impl_->name == other.impl_->name;
}

void Group::check_tangent(const TangentVector& x, const char* what) const {
    if (x.size() != impl_->p)
        throw DimensionError(std::string(what) + ": tangent vector of length " + std::to_string(x.size()) +
                             " on " + impl_->name + " (p = " + std::to_string(impl_->p) + ")");
}

void Group::check_element(const GroupElement& g, const char* what) const {
    if (g.group() != *this)
        throw DimensionError(std::string(what) + ": element of " + g.group().name() + " used on " + impl_->name);
}

GroupElement Group::identity() const {
    ParamVector params(impl_->params);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        f->identity(params.segment(impl_->param_off[i], f->param_dim()));
    }
    return GroupElement(*this, std::move(params));
}

GroupElement Group::compose(const GroupElement& a, const GroupElement& b) const {
    check_element(a, "compose");
    check_element(b, "compose");
    ParamVector out(impl_->params);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int o = impl_->param_off[i], k = f->param_dim();
        f->compose(a.params().segment(o, k), b.params().segment(o, k), out.segment(o, k));
    }
    return GroupElement(*this, std::move(out));
}

GroupElement Group::inverse(const GroupElement& a) const {
    check_element(a, "inverse");
    ParamVector out(impl_->params);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int o = impl_->param_off[i], k = f->param_dim();
        f->inverse(a.params().segment(o, k), out.segment(o, k));
    }
    return GroupElement(*this, std::move(out));
}

GroupElement Group::exp(const TangentVector& x) const {
    check_tangent(x, "exp");
    ParamVector out(impl_->params);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        f->exp(x.segment(impl_->alg_off[i], f->algebra_dim()),
               out.segment(impl_->param_off[i], f->param_dim()));
    }
    return GroupElement(*this, std::move(out));
}

TangentVector Group::log(const GroupElement& g) const {
    check_element(g, "log");
    TangentVector x(impl_->p);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        f->log(g.params().segment(impl_->param_off[i], f->param_dim()),
               x.segment(impl_->alg_off[i], f->algebra_dim()));
    }
    return x;
}

Eigen::MatrixXd Group::hat(const TangentVector& x) const {
    check_tangent(x, "hat");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(impl_->n, impl_->n);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int d = f->matrix_dim();
        f->hat(x.segment(impl_->alg_off[i], f->algebra_dim()), m.block(impl_->mat_off[i], impl_->mat_off[i], d, d));
    }
    return m;
}

TangentVector Group::vee(const Eigen::MatrixXd& m) const {
    if (m.rows() != impl_->n || m.cols() != impl_->n)
        throw DimensionError("vee: expected a " + std::to_string(impl_->n) + "x" + std::to_string(impl_->n) +
                             " algebra matrix on " + impl_->name);
    TangentVector x(impl_->p);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int d = f->matrix_dim();
        f->vee(m.block(impl_->mat_off[i], impl_->mat_off[i], d, d), x.segment(impl_->alg_off[i], f->algebra_dim()));
    }
    return x;
}

Eigen::MatrixXd Group::matrix(const GroupElement& g) const {
    check_element(g, "matrix");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(impl_->n, impl_->n);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int d = f->matrix_dim();
        f->to_matrix(g.params().segment(impl_->param_off[i], f->param_dim()),
                     m.block(impl_->mat_off[i], impl_->mat_off[i], d, d));
    }
    return m;
}

GroupElement Group::from_matrix(const Eigen::MatrixXd& m, double tol) const {
    if (m.rows() != impl_->n || m.cols() != impl_->n)
        throw DimensionError("from_matrix: expected a " + std::to_string(impl_->n) + "x" +
                             std::to_string(impl_->n) + " matrix on " + impl_->name);
    ParamVector params(impl_->params);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int o = impl_->mat_off[i], d = f->matrix_dim();
        // Off-diagonal blocks of a product element must vanish.
        for (int r = o; r < o + d; ++r)
            for (int c = 0; c < impl_->n; ++c)
                if ((c < o || c >= o + d) && std::abs(m(r, c)) > tol)
                    throw DimensionError("from_matrix: product element is not block-diagonal");
        f->from_matrix(m.block(o, o, d, d), params.segment(impl_->param_off[i], f->param_dim()), tol);
    }
    return GroupElement(*this, std::move(params));
}

GroupElement Group::from_params(const ParamVector& params) const {
    if (params.size() != impl_->params) throw DimensionError("from_params: wrong parameter length for " + impl_->name);
    if (!params.allFinite()) throw DimensionError("from_params: non-finite parameters");
    return GroupElement(*this, params);
}

Matrix Group::adjoint(const GroupElement& g) const {
    check_element(g, "adjoint");
    Matrix out = Matrix::Zero(impl_->p, impl_->p);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int o = impl_->alg_off[i], k = f->algebra_dim();
        f->adjoint(g.params().segment(impl_->param_off[i], f->param_dim()), out.block(o, o, k, k));
    }
    return out;
}

Matrix Group::ad(const TangentVector& x) const {
    check_tangent(x, "ad");
    Matrix out = Matrix::Zero(impl_->p, impl_->p);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int o = impl_->alg_off[i], k = f->algebra_dim();
        f->ad(x.segment(o, k), out.block(o, o, k, k));
    }
    return out;
}

Matrix Group::phi_jacobian(const TangentVector& x) const {
    check_tangent(x, "phi_jacobian");
    Matrix out = Matrix::Zero(impl_->p, impl_->p);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int o = impl_->alg_off[i], k = f->algebra_dim();
        f->phi(x.segment(o, k), out.block(o, o, k, k));
    }
    return out;
}

Matrix Group::phi_inv_jacobian(const TangentVector& x) const {
    check_tangent(x, "phi_inv_jacobian");
    Matrix out = Matrix::Zero(impl_->p, impl_->p);
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
        const auto& f = impl_->factors[i];
        const int o = impl_->alg_off[i], k = f->algebra_dim();
        f->phi_inv(x.segment(o, k), out.block(o, o, k, k));
    }
    return out;
}

double Group::distance(const GroupElement& a, const GroupElement& b) const {
    return log(compose(a, inverse(b))).norm();
}

GroupElement::GroupElement(Group group, ParamVector params) : group_(std::move(group)), params_(std::move(params)) {
    if (params_.size() != group_.param_dim())
        throw DimensionError("group element of " + group_.name() + " needs " + std::to_string(group_.param_dim()) +
                             " parameters, got " + std::to_string(params_.size()));
}

}  // namespace liemix
