#include "liemix/lg_ekf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "liemix/errors.hpp"

namespace liemix {

namespace {

/// Process noise may be singular (Q = 0 gives a deterministic model).
void check_psd(const Matrix& q, const char* what) {
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if (asymmetry(q) > 1e-12 * scale) throw NotPositiveDefiniteError(std::string(what) + ": matrix is not symmetric");
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(q, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale)
        throw NotPositiveDefiniteError(std::string(what) + ": matrix is not positive semi-definite");
}

void check_pose_velocity(const GroupElement& x, const char* what) {
    if (x.group() != pose_velocity_group())
        throw DimensionError(std::string(what) + ": expected a state on SE2xR3, got " + x.group().name());
}

}  // namespace

Group pose_velocity_group() {
    static const Group g = Group::product({Group::se2(), Group::euclidean(3)});
    return g;
}

GroupElement cv_transition(const GroupElement& x, double dt) {
    check_pose_velocity(x, "cv_transition");
    const Group se2 = Group::se2();
    const ParamVector& p = x.params();
    const Vector step = dt * p.segment<3>(3);
    ParamVector pose = p.head<3>();
    const GroupElement moved = se2.compose(se2.from_params(pose), se2.exp(step));
    ParamVector out = p;
    out.head<3>() = moved.params();
    return GroupElement(x.group(), std::move(out));
}

Matrix cv_jacobian(const GroupElement& mean, double dt) {
    check_pose_velocity(mean, "cv_jacobian");
    const Group se2 = Group::se2();
    const GroupElement pose = se2.from_params(mean.params().head<3>());
    const Vector vel = mean.params().segment<3>(3);
    const Matrix ad_pose = se2.adjoint(pose);
    const Vector arg = dt * (ad_pose * vel);
    Matrix f = Matrix::Identity(6, 6);
    f.block(0, 3, 3, 3) = dt * se2.phi_inv_jacobian(arg) * ad_pose;
    return f;
}

MotionModel constant_velocity_model(double dt, const Matrix& q) {
    if (q.rows() != 6 || q.cols() != 6) throw DimensionError("constant_velocity_model: Q must be 6x6");
    check_psd(q, "process noise");
    MotionModel m;
    m.f = [dt](const GroupElement& x) { return cv_transition(x, dt); };
    m.jacobian = [dt](const GroupElement& x) { return cv_jacobian(x, dt); };
    m.process_noise = q;
    m.dt = dt;
    return m;
}

MeasurementModel pose_measurement_model(const Matrix& r) {
    if (r.rows() != 3 || r.cols() != 3) throw DimensionError("pose_measurement_model: R must be 3x3");
    checked_cholesky(r, "measurement noise");
    MeasurementModel m;
    m.h = [](const GroupElement& x) {
        check_pose_velocity(x, "pose measurement");
        return Group::se2().from_params(x.params().head<3>());
    };
    m.jacobian = [](const GroupElement&) {
        Matrix h = Matrix::Zero(3, 6);
        h.leftCols(3).setIdentity();
        return h;
    };
    m.noise = r;
    return m;
}

CGD ekf_predict(const CGD& prior, const MotionModel& model) {
    const Group& g = prior.group();
    const GroupElement next = model.f(prior.mean());
    const Matrix f = model.jacobian(prior.mean());
    const int p = g.algebra_dim();
    if (f.rows() != p || f.cols() != p || model.process_noise.rows() != p)
        throw DimensionError("ekf_predict: model dimensions do not match the state group");
    const Vector omega = g.log(g.compose(next, g.inverse(prior.mean())));
    const Matrix big_phi = g.phi_inv_jacobian(omega);
    const Matrix cov = f * prior.cov() * f.transpose() + big_phi * model.process_noise * big_phi.transpose();
    return CGD::repaired(next, cov);
}

UpdateResult ekf_update(const CGD& prior, const GroupElement& z, const MeasurementModel& model) {
    const Group& g = prior.group();
    const Group& mg = z.group();
    const GroupElement predicted = model.h(prior.mean());
    if (predicted.group() != mg)
        throw DimensionError("ekf_update: measurement on " + mg.name() + " but model predicts " +
                             predicted.group().name());
    const Matrix h = model.jacobian(prior.mean());
    const int p = g.algebra_dim(), q = mg.algebra_dim();
    if (h.rows() != q || h.cols() != p || model.noise.rows() != q)
        throw DimensionError("ekf_update: model dimensions do not match");

    const Vector nu = mg.log(mg.compose(z, mg.inverse(predicted)));
    const Matrix s = symmetrize(h * prior.cov() * h.transpose() + model.noise);
    Eigen::LLT<Matrix> s_llt(s);
    if (s_llt.info() != Eigen::Success) throw NotPositiveDefiniteError("ekf_update: innovation covariance is singular");
    const Vector white = s_llt.matrixL().solve(nu);
    const double maha = white.squaredNorm();
    const double log_lik =
        -0.5 * (q * std::log(2.0 * std::numbers::pi) + log_det(s_llt) + maha);
    if (model.gate && maha > *model.gate) return UpdateResult{prior, log_lik, true};

    // K = Sigma H^T S^{-1}
    const Matrix k = s_llt.solve(h * prior.cov()).transpose();
    const Vector correction = k * nu;
    const Matrix big_phi = g.phi_inv_jacobian(correction);
    const Matrix ikh = Matrix::Identity(p, p) - k * h;
    const Matrix cov = big_phi * (ikh * prior.cov()) * big_phi.transpose();
    return UpdateResult{CGD::repaired(g.compose(g.exp(correction), prior.mean()), cov), log_lik, false};
}

}  // namespace liemix
