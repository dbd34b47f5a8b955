#pragma once

#include <functional>
#include <optional>

#include "liemix/cgd.hpp"

namespace liemix {

/**
 * State transition X_k = f(X_{k-1}) with left-perturbation Jacobian
 * F = -d/ds log(f(mu) f(exp(s) mu)^{-1}) at s = 0, and process noise Q
 * injected in the tangent space at the predicted mean.
 */
struct MotionModel {
    std::function<GroupElement(const GroupElement&)> f;
    std::function<Matrix(const GroupElement&)> jacobian;
    Matrix process_noise;
    double dt = 1.0;
};

/// Measurement Z = h(X) on a measurement group, with Jacobian H (q x p).
struct MeasurementModel {
    std::function<GroupElement(const GroupElement&)> h;
    std::function<Matrix(const GroupElement&)> jacobian;
    Matrix noise;
    /// Mahalanobis gate on the innovation (squared distance); off when unset.
    std::optional<double> gate;
};

/// The study-example state space SE(2) x R^3: pose and body velocity [v_x, v_y, omega].
Group pose_velocity_group();

/// f(X) = (X^pos exp([dt X^vel]), X^vel) on SE(2) x R^3.
GroupElement cv_transition(const GroupElement& x, double dt);

/// [[I, dt Phi(dt Ad(mu^pos) mu^vel) Ad(mu^pos)], [0, I]]
Matrix cv_jacobian(const GroupElement& mean, double dt);

/// Constant-velocity model on SE(2) x R^3 with process noise `q` (6 x 6).
MotionModel constant_velocity_model(double dt, const Matrix& q);

/// h(X) = X^pos on SE(2) x R^3, H = [I 0], noise `r` (3 x 3).
MeasurementModel pose_measurement_model(const Matrix& r);

/// mean' = f(mean); cov' = F Sigma F^T + Phi(Omega) Q Phi(Omega)^T with
/// Omega = log(f(mean) mean^{-1}).
CGD ekf_predict(const CGD& prior, const MotionModel& model);

struct UpdateResult {
    CGD posterior;
    double log_likelihood;  // log N(innovation; 0, S)
    bool gated_out = false;
};

/// nu = log(z h(mean)^{-1}); S = H Sigma H^T + R; K = Sigma H^T S^{-1};
/// mean+ = exp(K nu) mean; cov+ = Phi(K nu) (I - K H) Sigma Phi(K nu)^T.
UpdateResult ekf_update(const CGD& prior, const GroupElement& z, const MeasurementModel& model);

}  // namespace liemix
