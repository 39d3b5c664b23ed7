#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rb/series.hpp"

namespace rb {

// Fidelity decay models:
//   exponential       F = A a^m + e0            theta = (a, A, e0)
//   dual_exponential  F = C1 a^m + C2 b^m + C3  theta = (a, b, C1, C2, C3)
//   gaussian          F = A b^(m^2) + e0        theta = (b, A, e0)
// Decay bases live in (0, 1); they are optimized through a logistic
// transform and reported in the original space.
enum class ModelKind { exponential, dual_exponential, gaussian };

const char* model_name(ModelKind kind);
int model_param_count(ModelKind kind);
std::vector<std::string> model_param_names(ModelKind kind);
double model_eval(ModelKind kind, const Eigen::VectorXd& theta, double m);

struct FitResult {
    ModelKind kind = ModelKind::exponential;
    Eigen::VectorXd theta;
    Eigen::MatrixXd covariance;  // s^2 (J^T J)^-1 in original parameters
    double s2 = 0.0;
    Eigen::VectorXd ci90_half;   // per-parameter half widths at delta = 0.1
    Eigen::VectorXd residuals;
    int n_points = 0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    bool rank_deficient = false;
    // Dual-exponential fits whose bases merged within 1e-4 are refit with a
    // single exponential; the C2 term is absorbed into C1.
    bool coalesced = false;

    double alpha() const { return theta(0); }
    // Average error rate estimate (1 - alpha)(d - 1)/d.
    double r_hat(int dim = 2) const {
        return (1.0 - theta(0)) * (dim - 1) / dim;
    }
};

// Damped Gauss-Newton least squares with analytic Jacobian. Converged when
// the relative step drops below 1e-12, capped at 200 iterations. Optional
// weights are inverse-variance multipliers on the squared residuals.
FitResult fit(const std::vector<double>& m, const std::vector<double>& y,
              ModelKind kind, const std::vector<double>* weights = nullptr);
FitResult fit(const DecaySeries& series, ModelKind kind,
              bool inverse_variance_weights = false);

// theta_j +/- sqrt(V_jj) t_{N-D, 1-delta/2}.
Eigen::VectorXd confidence_interval_half_width(const FitResult& fit,
                                               double delta);

// Expected half width of the confidence interval on the decay base for a
// hypothetical experiment: linearize at theta over the given m grid with
// per-point noise sigma/sqrt(K). Mirrors the covariance construction used
// after real fits.
double predicted_alpha_ci_half_width(ModelKind kind,
                                     const Eigen::VectorXd& theta,
                                     const std::vector<double>& m,
                                     double sigma, double k_sequences,
                                     double delta);

// Inverse CDF of Student's t via the inverse regularized incomplete beta
// (continued fraction plus Newton polish); absolute error <= 1e-9.
double student_t_quantile(double p, double dof);

// Trial count from the Hoeffding bound: ceil(ln(2/delta) range^2 / (2 eps^2)).
std::uint64_t hoeffding_k(double delta, double epsilon, double range);

struct AccuracyConfidence {
    // log10(r_hat / r); empty when r_hat <= 0 (negative estimates happen for
    // interleaved experiments and are reported, not clamped).
    std::optional<double> mu;
    // Full width of the 90% confidence interval on the decay base.
    double confidence = 0.0;
};

AccuracyConfidence accuracy_and_confidence(const FitResult& fit, double true_r,
                                           int dim = 2);

std::string fit_result_to_json(const FitResult& fit,
                               std::optional<double> true_r = std::nullopt,
                               int dim = 2);

}  // namespace rb
