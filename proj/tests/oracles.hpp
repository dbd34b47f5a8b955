#pragma once

// Reference implementations used only by the tests. None of them calls the
// library's group, distribution or reduction code.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// exp(A) by scaling and squaring around a Taylor series with `terms` terms.
Mat expm_series(const Mat& a, int terms = 30);

/// log(M) by inverse scaling and squaring (Denman-Beavers square roots,
/// then the Mercator series with `terms` terms).
Mat logm_series(const Mat& m, int terms = 60);

/// Bernoulli numbers B_0..B_n (B_1 = -1/2) from the defining recurrence.
std::vector<double> bernoulli(int n);

/// sum_{k < terms} B_k A^k / k!
Mat bernoulli_series(const Mat& a, int terms);

/// sum_{k < terms} A^k / (k + 1)!
Mat left_jacobian_series(const Mat& a, int terms);

/// hat map on se(2) with tangent order [rho_x, rho_y, theta].
Mat se2_hat(const Vec& x);
/// Matrix of ad on se(2) built by evaluating [hat(x), hat(e_k)] on the basis.
Mat se2_ad(const Vec& x);

/// Classical Gaussian.
struct Gauss {
    double w;
    Vec m;
    Mat c;
};

double kl(const Gauss& a, const Gauss& b);
double skl(const Gauss& a, const Gauss& b);
Gauss moment_merge(const Gauss& a, const Gauss& b);

enum class Pick { Exhaustive, West };

/// Flat Gaussian-mixture reduction with the same picking, stopping and
/// tie-breaking rules as the library (merged component keeps the lower index).
std::vector<Gauss> reduce_flat(std::vector<Gauss> mix, Pick pick, std::optional<std::size_t> max_components,
                               std::optional<double> threshold);

/// Textbook Kalman filter.
void kf_predict(Vec& m, Mat& c, const Mat& f, const Mat& q);
/// Returns log N(z; H m, S).
double kf_update(Vec& m, Mat& c, const Vec& z, const Mat& h, const Mat& r);

double log_normal(const Vec& x, const Vec& mean, const Mat& cov);

/// One predict + update step of a linear GM-PHD (no pruning or merging).
std::vector<Gauss> gmphd_step(const std::vector<Gauss>& d, const std::vector<Vec>& z, const Mat& f, const Mat& q,
                              const Mat& h, const Mat& r, double p_s, double p_d, double kappa,
                              const std::vector<Gauss>& birth);

/// Minimum-cost assignment of every row to a distinct column (rows <= cols)
/// by enumerating all injections.
double brute_force_assignment(const Mat& cost, std::vector<int>* row_to_col = nullptr);

/// OSPA by brute force, with the given base distance matrix (rows: estimates).
struct Ospa {
    double total, loc, card;
};
Ospa ospa_brute(const Mat& dist, double c, double p);

}  // namespace oracle
