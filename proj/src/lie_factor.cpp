#include "liemix/lie_factor.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "liemix/errors.hpp"

namespace liemix {

namespace {

// B_0 .. B_20
constexpr std::array<double, 21> kBernoulli = {
    1.0,          -0.5,  1.0 / 6.0, 0.0, -1.0 / 30.0,   0.0, 1.0 / 42.0,      0.0,
    -1.0 / 30.0,  0.0,   5.0 / 66.0, 0.0, -691.0 / 2730.0, 0.0, 7.0 / 6.0,     0.0,
    -3617.0 / 510.0, 0.0, 43867.0 / 798.0, 0.0, -174611.0 / 330.0};

}  // namespace

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (a > -std::numbers::pi && a <= std::numbers::pi) return a;
    double w = std::fmod(a + std::numbers::pi, two_pi);
    if (w <= 0.0) w += two_pi;
    return w - std::numbers::pi;
}

SeriesResult bernoulli_series(const Matrix& ad_x, int terms) {
    const auto p = ad_x.rows();
    SeriesResult res;
    res.value = Matrix::Identity(p, p);
    Matrix power = Matrix::Identity(p, p);
    double factorial = 1.0;
    const int max_n = static_cast<int>(kBernoulli.size()) - 1;
    int n = 1;
    for (; n < terms && n <= max_n; ++n) {
        power = power * ad_x;
        factorial *= n;
        if (kBernoulli[n] != 0.0) res.value += (kBernoulli[n] / factorial) * power;
    }
    // First omitted nonzero term.
    for (; n <= max_n; ++n) {
        power = power * ad_x;
        factorial *= n;
        if (kBernoulli[n] != 0.0) {
            res.tail_norm = std::abs(kBernoulli[n] / factorial) * power.norm();
            break;
        }
    }
    res.converged = std::isfinite(res.tail_norm) && res.tail_norm <= kSeriesTolerance;
    return res;
}

void LieFactor::phi(ConstVecRef x, MatRef out) const {
    const int p = algebra_dim();
    Matrix adm(p, p);
    ad(x, adm);
    SeriesResult s = bernoulli_series(adm);
    if (!s.converged)
        throw SeriesConvergenceError(name() + ": Bernoulli series for phi did not converge (tail " +
                                     std::to_string(s.tail_norm) + ")");
    out = s.value;
}

void LieFactor::phi_inv(ConstVecRef x, MatRef out) const {
    const int p = algebra_dim();
    Matrix m(p, p);
    phi(x, m);
    out = m.inverse();
}

// ---------------------------------------------------------------- SO(2)

void SO2Factor::identity(VecRef g) const { g(0) = 0.0; }

void SO2Factor::compose(ConstVecRef a, ConstVecRef b, VecRef out) const {
    out(0) = wrap_angle(a(0) + b(0));
}

void SO2Factor::inverse(ConstVecRef a, VecRef out) const { out(0) = wrap_angle(-a(0)); }

void SO2Factor::exp(ConstVecRef x, VecRef g) const { g(0) = wrap_angle(x(0)); }

void SO2Factor::log(ConstVecRef g, VecRef x) const {
    if (std::abs(g(0)) >= std::numbers::pi - 1e-12)
        throw SingularLogError("SO2 log: rotation angle at pi");
    x(0) = g(0);
}

void SO2Factor::hat(ConstVecRef x, MatRef m) const {
    m << 0.0, -x(0), x(0), 0.0;
}

void SO2Factor::vee(ConstMatRef m, VecRef x) const { x(0) = m(1, 0); }

void SO2Factor::to_matrix(ConstVecRef g, MatRef m) const {
    const double c = std::cos(g(0)), s = std::sin(g(0));
    m << c, -s, s, c;
}

void SO2Factor::from_matrix(ConstMatRef m, VecRef g, double tol) const {
    if (m.rows() != 2 || m.cols() != 2) throw DimensionError("SO2: expected a 2x2 matrix");
    Eigen::Matrix2d r = m;
    if ((r.transpose() * r - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > tol ||
        std::abs(r.determinant() - 1.0) > tol)
        throw DimensionError("SO2: matrix is not a rotation");
    g(0) = std::atan2(m(1, 0), m(0, 0));
}

void SO2Factor::adjoint(ConstVecRef, MatRef out) const { out(0, 0) = 1.0; }
void SO2Factor::ad(ConstVecRef, MatRef out) const { out(0, 0) = 0.0; }
void SO2Factor::phi(ConstVecRef, MatRef out) const { out(0, 0) = 1.0; }
void SO2Factor::phi_inv(ConstVecRef, MatRef out) const { out(0, 0) = 1.0; }

// ---------------------------------------------------------------- SE(2)

namespace {

// a = sin t / t, b = (1 - cos t) / t, c = (t - sin t) / t^2, d = (1 - cos t) / t^2
struct Se2Coeffs {
    double a, b, c, d;
};

Se2Coeffs se2_coeffs(double t) {
    Se2Coeffs k{};
    const double t2 = t * t;
    if (std::abs(t) < 1e-4) {
        k.a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        k.b = t * (0.5 - t2 / 24.0 + t2 * t2 / 720.0);
        k.d = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
        const double h = std::sin(0.5 * t);
        k.a = std::sin(t) / t;
        k.b = 2.0 * h * h / t;
        k.d = 2.0 * h * h / t2;
    }
    if (std::abs(t) < 0.1) {
        // t/3! - t^3/5! + t^5/7! - t^7/9! + t^9/11!
        k.c = t * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0 - t2 * (1.0 / 362880.0 - t2 / 39916800.0))));
    } else {
        k.c = (t - std::sin(t)) / t2;
    }
    return k;
}

}  // namespace

void SE2Factor::identity(VecRef g) const { g.setZero(); }

void SE2Factor::compose(ConstVecRef a, ConstVecRef b, VecRef out) const {
    const double c = std::cos(a(2)), s = std::sin(a(2));
    const double x = a(0) + c * b(0) - s * b(1);
    const double y = a(1) + s * b(0) + c * b(1);
    out(0) = x;
    out(1) = y;
    out(2) = wrap_angle(a(2) + b(2));
}

void SE2Factor::inverse(ConstVecRef a, VecRef out) const {
    const double c = std::cos(a(2)), s = std::sin(a(2));
    const double x = -(c * a(0) + s * a(1));
    const double y = -(-s * a(0) + c * a(1));
    out(0) = x;
    out(1) = y;
    out(2) = wrap_angle(-a(2));
}

void SE2Factor::exp(ConstVecRef x, VecRef g) const {
    const Se2Coeffs k = se2_coeffs(x(2));
    const double tx = k.a * x(0) - k.b * x(1);
    const double ty = k.b * x(0) + k.a * x(1);
    g(0) = tx;
    g(1) = ty;
    g(2) = wrap_angle(x(2));
}

void SE2Factor::log(ConstVecRef g, VecRef x) const {
    const double theta = g(2);
    if (std::abs(theta) >= std::numbers::pi - 1e-12)
        throw SingularLogError("SE2 log: rotation angle at pi");
    const Se2Coeffs k = se2_coeffs(theta);
    const double den = k.a * k.a + k.b * k.b;
    const double rx = (k.a * g(0) + k.b * g(1)) / den;
    const double ry = (-k.b * g(0) + k.a * g(1)) / den;
    x(0) = rx;
    x(1) = ry;
    x(2) = theta;
}

void SE2Factor::hat(ConstVecRef x, MatRef m) const {
    m << 0.0, -x(2), x(0),
         x(2), 0.0, x(1),
         0.0, 0.0, 0.0;
}

void SE2Factor::vee(ConstMatRef m, VecRef x) const {
    x(0) = m(0, 2);
    x(1) = m(1, 2);
    x(2) = m(1, 0);
}

void SE2Factor::to_matrix(ConstVecRef g, MatRef m) const {
    const double c = std::cos(g(2)), s = std::sin(g(2));
    m << c, -s, g(0),
         s, c, g(1),
         0.0, 0.0, 1.0;
}

void SE2Factor::from_matrix(ConstMatRef m, VecRef g, double tol) const {
    if (m.rows() != 3 || m.cols() != 3) throw DimensionError("SE2: expected a 3x3 matrix");
    Eigen::Matrix2d r = m.topLeftCorner(2, 2);
    const bool rot_ok = (r.transpose() * r - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= tol &&
                        std::abs(r.determinant() - 1.0) <= tol;
    const bool row_ok = std::abs(m(2, 0)) <= tol && std::abs(m(2, 1)) <= tol && std::abs(m(2, 2) - 1.0) <= tol;
    if (!rot_ok || !row_ok) throw DimensionError("SE2: matrix is not a rigid motion");
    g(0) = m(0, 2);
    g(1) = m(1, 2);
    g(2) = std::atan2(m(1, 0), m(0, 0));
}

void SE2Factor::adjoint(ConstVecRef g, MatRef out) const {
    const double c = std::cos(g(2)), s = std::sin(g(2));
    out << c, -s, g(1),
           s, c, -g(0),
           0.0, 0.0, 1.0;
}

void SE2Factor::ad(ConstVecRef x, MatRef out) const {
    out << 0.0, -x(2), x(1),
           x(2), 0.0, -x(0),
           0.0, 0.0, 0.0;
}

void SE2Factor::phi_inv(ConstVecRef x, MatRef out) const {
    const Se2Coeffs k = se2_coeffs(x(2));
    out << k.a, -k.b, x(0) * k.c + x(1) * k.d,
           k.b, k.a, -x(0) * k.d + x(1) * k.c,
           0.0, 0.0, 1.0;
}

void SE2Factor::phi(ConstVecRef x, MatRef out) const {
    const Se2Coeffs k = se2_coeffs(x(2));
    const double den = k.a * k.a + k.b * k.b;
    const double ia = k.a / den, ib = k.b / den;
    const double wx = x(0) * k.c + x(1) * k.d;
    const double wy = -x(0) * k.d + x(1) * k.c;
    // [[V^-1, -V^-1 w], [0, 1]] with V^-1 = [[ia, ib], [-ib, ia]]
    out << ia, ib, -(ia * wx + ib * wy),
           -ib, ia, -(-ib * wx + ia * wy),
           0.0, 0.0, 1.0;
}

// ---------------------------------------------------------------- R^n

EuclideanFactor::EuclideanFactor(int n) : n_(n) {
    if (n < 1) throw DimensionError("Euclidean factor needs n >= 1");
}

void EuclideanFactor::identity(VecRef g) const { g.setZero(); }
void EuclideanFactor::compose(ConstVecRef a, ConstVecRef b, VecRef out) const { out = a + b; }
void EuclideanFactor::inverse(ConstVecRef a, VecRef out) const { out = -a; }
void EuclideanFactor::exp(ConstVecRef x, VecRef g) const { g = x; }
void EuclideanFactor::log(ConstVecRef g, VecRef x) const { x = g; }

void EuclideanFactor::hat(ConstVecRef x, MatRef m) const {
    m.setZero();
    m.topRightCorner(n_, 1) = x;
}

void EuclideanFactor::vee(ConstMatRef m, VecRef x) const { x = m.topRightCorner(n_, 1); }

void EuclideanFactor::to_matrix(ConstVecRef g, MatRef m) const {
    m.setIdentity();
    m.topRightCorner(n_, 1) = g;
}

void EuclideanFactor::from_matrix(ConstMatRef m, VecRef g, double tol) const {
    if (m.rows() != n_ + 1 || m.cols() != n_ + 1)
        throw DimensionError(name() + ": expected a homogeneous " + std::to_string(n_ + 1) + "x" +
                             std::to_string(n_ + 1) + " matrix");
    Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(n_ + 1, n_ + 1);
    expect.topRightCorner(n_, 1) = m.topRightCorner(n_, 1);
    if ((m - expect).cwiseAbs().maxCoeff() > tol) throw DimensionError(name() + ": matrix is not a translation");
    g = m.topRightCorner(n_, 1);
}

void EuclideanFactor::adjoint(ConstVecRef, MatRef out) const { out.setIdentity(); }
void EuclideanFactor::ad(ConstVecRef, MatRef out) const { out.setZero(); }
void EuclideanFactor::phi(ConstVecRef, MatRef out) const { out.setIdentity(); }
void EuclideanFactor::phi_inv(ConstVecRef, MatRef out) const { out.setIdentity(); }

}  // namespace liemix
