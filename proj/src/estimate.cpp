#include "rb/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rb/ptm.hpp"  // format_double

namespace rb {

namespace {

// --- regularized incomplete beta -----------------------------------------

double betacf(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

// Newton with bisection safeguard on I_x(a, b) = y.
double inv_inc_beta(double a, double b, double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    double lo = 0.0, hi = 1.0, x = 0.5;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    for (int it = 0; it < 200; ++it) {
        const double f = inc_beta(a, b, x) - y;
        if (f > 0)
            hi = x;
        else
            lo = x;
        const double pdf = std::exp((a - 1.0) * std::log(x) +
                                    (b - 1.0) * std::log1p(-x) - lbeta);
        double next = x - f / pdf;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-15 * (1.0 + x)) return next;
        x = next;
    }
    return x;
}

// --- model evaluation ------------------------------------------------------

double pow_base(double base, double exponent) {
    if (base <= 0.0) return exponent == 0.0 ? 1.0 : 0.0;
    return std::exp(exponent * std::log(base));
}

int base_count(ModelKind kind) {
    return kind == ModelKind::dual_exponential ? 2 : 1;
}

// F and the original-space Jacobian row at one m.
void eval_point(ModelKind kind, const Eigen::VectorXd& t, double m, double& f,
                Eigen::VectorXd& jrow) {
    switch (kind) {
        case ModelKind::exponential: {
            const double am = pow_base(t(0), m);
            f = t(1) * am + t(2);
            jrow(0) = t(1) * m * pow_base(t(0), m - 1.0);
            jrow(1) = am;
            jrow(2) = 1.0;
            break;
        }
        case ModelKind::dual_exponential: {
            const double am = pow_base(t(0), m);
            const double bm = pow_base(t(1), m);
            f = t(2) * am + t(3) * bm + t(4);
            jrow(0) = t(2) * m * pow_base(t(0), m - 1.0);
            jrow(1) = t(3) * m * pow_base(t(1), m - 1.0);
            jrow(2) = am;
            jrow(3) = bm;
            jrow(4) = 1.0;
            break;
        }
        case ModelKind::gaussian: {
            const double m2 = m * m;
            const double bm = pow_base(t(0), m2);
            f = t(1) * bm + t(2);
            jrow(0) = t(1) * m2 * pow_base(t(0), m2 - 1.0);
            jrow(1) = bm;
            jrow(2) = 1.0;
            break;
        }
    }
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double logit(double p) {
    p = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return std::log(p / (1.0 - p));
}

Eigen::VectorXd to_internal(ModelKind kind, const Eigen::VectorXd& theta) {
    Eigen::VectorXd u = theta;
    for (int i = 0; i < base_count(kind); ++i) u(i) = logit(theta(i));
    return u;
}

Eigen::VectorXd to_theta(ModelKind kind, const Eigen::VectorXd& u) {
    Eigen::VectorXd t = u;
    for (int i = 0; i < base_count(kind); ++i) t(i) = logistic(u(i));
    return t;
}

double sum_squares(ModelKind kind, const Eigen::VectorXd& theta,
                   const std::vector<double>& m, const std::vector<double>& y,
                   const std::vector<double>* w) {
    double s = 0.0;
    Eigen::VectorXd scratch(model_param_count(kind));
    for (size_t i = 0; i < m.size(); ++i) {
        double f;
        eval_point(kind, theta, m[i], f, scratch);
        const double r = y[i] - f;
        s += (w ? (*w)[i] : 1.0) * r * r;
    }
    return s;
}

struct LmOutcome {
    Eigen::VectorXd theta;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    double sse = 0.0;
};

LmOutcome levenberg(ModelKind kind, Eigen::VectorXd theta0,
                    const std::vector<double>& m, const std::vector<double>& y,
                    const std::vector<double>* w) {
    const int n = static_cast<int>(m.size());
    const int d = model_param_count(kind);
    Eigen::VectorXd u = to_internal(kind, theta0);
    double lambda = 1e-3;
    double sse = sum_squares(kind, to_theta(kind, u), m, y, w);

    LmOutcome out;
    Eigen::MatrixXd j(n, d);
    Eigen::VectorXd resid(n), jrow(d);
    int iter = 0;
    for (; iter < 200; ++iter) {
        const Eigen::VectorXd theta = to_theta(kind, u);
        for (int i = 0; i < n; ++i) {
            double f;
            eval_point(kind, theta, m[i], f, jrow);
            const double sw = w ? std::sqrt((*w)[i]) : 1.0;
            resid(i) = sw * (y[i] - f);
            j.row(i) = sw * jrow.transpose();
        }
        // chain rule onto the logistic-transformed bases
        for (int p = 0; p < base_count(kind); ++p)
            j.col(p) *= theta(p) * (1.0 - theta(p));

        const Eigen::VectorXd g = j.transpose() * resid;
        out.gradient_norm = g.cwiseAbs().maxCoeff();
        if (out.gradient_norm < 1e-14) {
            out.converged = true;
            break;
        }
        const Eigen::MatrixXd jtj = j.transpose() * j;

        bool accepted = false;
        Eigen::VectorXd step(d);
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd damped = jtj;
            for (int p = 0; p < d; ++p)
                damped(p, p) += lambda * std::max(jtj(p, p), 1e-12);
            step = damped.ldlt().solve(g);
            const Eigen::VectorXd u_new = u + step;
            const double sse_new =
                sum_squares(kind, to_theta(kind, u_new), m, y, w);
            if (sse_new <= sse + 1e-18) {
                u = u_new;
                sse = sse_new;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
            if (lambda > 1e14) break;
        }
        if (!accepted) {
            out.converged = out.gradient_norm < 1e-8;
            break;
        }
        double rel = 0.0;
        for (int p = 0; p < d; ++p)
            rel = std::max(rel, std::abs(step(p)) / (1.0 + std::abs(u(p))));
        if (rel < 1e-12) {
            out.converged = true;
            ++iter;
            break;
        }
    }
    out.iterations = iter;
    out.theta = to_theta(kind, u);
    out.sse = sse;
    if (!out.converged && out.gradient_norm < 1e-10) out.converged = true;
    return out;
}

Eigen::VectorXd exponential_guess(const std::vector<double>& m,
                                  const std::vector<double>& y,
                                  bool gaussian_exponent) {
    const size_t n = m.size();
    const double e0 = y[n - 1];
    const double a_amp = y[0] - e0;
    double base = 0.95;
    const double den = y[0] - e0, num = y[1] - e0;
    if (den != 0.0 && num / den > 0.0) {
        const double span = gaussian_exponent ? m[1] * m[1] - m[0] * m[0]
                                              : m[1] - m[0];
        if (span > 0.0) base = std::pow(num / den, 1.0 / span);
    }
    base = std::clamp(base, 1e-4, 1.0 - 1e-12);
    Eigen::VectorXd t(3);
    t << base, a_amp, e0;
    return t;
}

}  // namespace

const char* model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::exponential: return "exponential";
        case ModelKind::dual_exponential: return "dual_exponential";
        case ModelKind::gaussian: return "gaussian";
    }
    return "?";
}

int model_param_count(ModelKind kind) {
    return kind == ModelKind::dual_exponential ? 5 : 3;
}

std::vector<std::string> model_param_names(ModelKind kind) {
    switch (kind) {
        case ModelKind::exponential: return {"alpha", "A", "e0"};
        case ModelKind::dual_exponential:
            return {"alpha", "beta", "C1", "C2", "C3"};
        case ModelKind::gaussian: return {"beta", "A", "e0"};
    }
    return {};
}

double model_eval(ModelKind kind, const Eigen::VectorXd& theta, double m) {
    double f;
    Eigen::VectorXd scratch(model_param_count(kind));
    eval_point(kind, theta, m, f, scratch);
    return f;
}

FitResult fit(const std::vector<double>& m, const std::vector<double>& y,
              ModelKind kind, const std::vector<double>* weights) {
    const int n = static_cast<int>(m.size());
    const int d = model_param_count(kind);
    if (static_cast<int>(y.size()) != n)
        throw std::invalid_argument("fit: m and y length mismatch");
    if (n < d + 1)
        throw std::invalid_argument("fit: need at least D+1 points");
    if (weights && static_cast<int>(weights->size()) != n)
        throw std::invalid_argument("fit: weight length mismatch");

    LmOutcome best;
    if (kind == ModelKind::dual_exponential) {
        // Seed from a single-exponential fit; several base splits guard
        // against the second exponential starting in the wrong basin.
        FitResult single = fit(m, y, ModelKind::exponential, weights);
        const double a = std::clamp(single.theta(0), 1e-4, 1.0 - 1e-12);
        const double amp = single.theta(1), e0 = single.theta(2);
        bool have = false;
        for (double split : {0.999, 0.5, 0.1}) {
            Eigen::VectorXd t0(5);
            t0 << std::min(a * 1.0005, 1.0 - 1e-12),
                std::clamp(a * split, 1e-6, 1.0 - 1e-12), 2.0 * amp / 3.0,
                amp / 3.0, e0;
            LmOutcome cand = levenberg(kind, t0, m, y, weights);
            if (!have || cand.sse < best.sse) {
                best = cand;
                have = true;
            }
        }
        // Identifiability guards: merged bases, a vacuous second amplitude,
        // or a runaway (base -> 1, huge compensating constants) branch all
        // degrade to the single-exponential fit with C2 absorbed into C1.
        const double amp_scale =
            std::abs(best.theta(2)) + std::abs(best.theta(3));
        const bool vacuous_c2 =
            amp_scale > 0.0 && std::abs(best.theta(3)) < 1e-6 * amp_scale;
        const double y_span = 1.0 + std::abs(*std::max_element(y.begin(), y.end())) +
                              std::abs(*std::min_element(y.begin(), y.end()));
        const bool runaway = amp_scale > 3.0 * y_span;
        if (std::abs(best.theta(0) - best.theta(1)) < 1e-4 || vacuous_c2 ||
            runaway || !best.converged) {
            FitResult out;
            out.kind = kind;
            out.coalesced = true;
            out.converged = single.converged;
            out.iterations = single.iterations;
            out.gradient_norm = single.gradient_norm;
            out.rank_deficient = single.rank_deficient;
            out.n_points = n;
            out.s2 = single.s2;
            out.residuals = single.residuals;
            out.theta = Eigen::VectorXd(5);
            out.theta << single.theta(0), single.theta(0), single.theta(1),
                0.0, single.theta(2);
            out.covariance = Eigen::MatrixXd::Zero(5, 5);
            const int map[3] = {0, 2, 4};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    out.covariance(map[i], map[j]) = single.covariance(i, j);
            out.covariance(1, 1) = single.covariance(0, 0);
            out.ci90_half = Eigen::VectorXd::Zero(5);
            for (int i = 0; i < 3; ++i)
                out.ci90_half(map[i]) = single.ci90_half(i);
            out.ci90_half(1) = single.ci90_half(0);
            return out;
        }
    } else {
        best = levenberg(kind, exponential_guess(m, y, kind == ModelKind::gaussian),
                         m, y, weights);
    }

    FitResult out;
    out.kind = kind;
    out.theta = best.theta;
    out.converged = best.converged;
    out.iterations = best.iterations;
    out.gradient_norm = best.gradient_norm;
    out.n_points = n;

    // Covariance of the linearized model at the solution, in the original
    // parameter space.
    Eigen::MatrixXd j(n, d);
    Eigen::VectorXd resid(n), jrow(d);
    for (int i = 0; i < n; ++i) {
        double f;
        eval_point(kind, best.theta, m[i], f, jrow);
        const double sw = weights ? std::sqrt((*weights)[i]) : 1.0;
        resid(i) = sw * (y[i] - f);
        j.row(i) = sw * jrow.transpose();
    }
    out.residuals = resid;
    out.s2 = resid.squaredNorm() / (n - d);

    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        jtj, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond_floor = svd.singularValues()(0) * 1e-14;
    Eigen::VectorXd inv_sv(d);
    for (int i = 0; i < d; ++i) {
        if (svd.singularValues()(i) > cond_floor) {
            inv_sv(i) = 1.0 / svd.singularValues()(i);
        } else {
            inv_sv(i) = 0.0;
            out.rank_deficient = true;
        }
    }
    out.covariance = out.s2 * svd.matrixV() * inv_sv.asDiagonal() *
                     svd.matrixU().transpose();
    out.ci90_half = confidence_interval_half_width(out, 0.1);
    return out;
}

FitResult fit(const DecaySeries& series, ModelKind kind,
              bool inverse_variance_weights) {
    if (!inverse_variance_weights) return fit(series.m, series.f_mean, kind);
    std::vector<double> w(series.m.size());
    for (size_t i = 0; i < w.size(); ++i) {
        const double se = std::max(series.f_stderr[i], 1e-12);
        w[i] = 1.0 / (se * se);
    }
    return fit(series.m, series.f_mean, kind, &w);
}

Eigen::VectorXd confidence_interval_half_width(const FitResult& f,
                                               double delta) {
    const int d = static_cast<int>(f.theta.size());
    const int dof = f.n_points - model_param_count(f.kind);
    if (dof < 1)
        throw std::invalid_argument("confidence_interval: N <= D");
    const double t = student_t_quantile(1.0 - delta / 2.0, dof);
    Eigen::VectorXd half(d);
    for (int i = 0; i < d; ++i)
        half(i) = std::sqrt(std::max(f.covariance(i, i), 0.0)) * t;
    return half;
}

double predicted_alpha_ci_half_width(ModelKind kind,
                                     const Eigen::VectorXd& theta,
                                     const std::vector<double>& m,
                                     double sigma, double k_sequences,
                                     double delta) {
    const int n = static_cast<int>(m.size());
    const int d = model_param_count(kind);
    if (n <= d) throw std::invalid_argument("predicted ci: N <= D");
    Eigen::MatrixXd j(n, d);
    Eigen::VectorXd jrow(d);
    for (int i = 0; i < n; ++i) {
        double f;
        eval_point(kind, theta, m[i], f, jrow);
        j.row(i) = jrow.transpose();
    }
    const Eigen::MatrixXd q = (j.transpose() * j).inverse();
    const double s =
        sigma * std::sqrt(static_cast<double>(n) / ((n - d) * k_sequences));
    return student_t_quantile(1.0 - delta / 2.0, n - d) * s *
           std::sqrt(q(0, 0));
}

double student_t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("student_t_quantile: p outside (0, 1)");
    if (dof < 1.0)
        throw std::invalid_argument("student_t_quantile: dof < 1");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -student_t_quantile(1.0 - p, dof);
    const double x = inv_inc_beta(dof / 2.0, 0.5, 2.0 * (1.0 - p));
    if (x <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(dof * (1.0 - x) / x);
}

std::uint64_t hoeffding_k(double delta, double epsilon, double range) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("hoeffding_k: delta outside (0, 1)");
    if (epsilon <= 0.0) throw std::invalid_argument("hoeffding_k: epsilon <= 0");
    if (range <= 0.0) throw std::invalid_argument("hoeffding_k: range <= 0");
    const double k =
        std::log(2.0 / delta) * range * range / (2.0 * epsilon * epsilon);
    return static_cast<std::uint64_t>(std::ceil(k));
}

AccuracyConfidence accuracy_and_confidence(const FitResult& f, double true_r,
                                           int dim) {
    if (true_r <= 0.0)
        throw std::invalid_argument("accuracy_and_confidence: r <= 0");
    AccuracyConfidence out;
    const double r_hat = f.r_hat(dim);
    if (r_hat > 0.0) out.mu = std::log10(r_hat / true_r);
    out.confidence = 2.0 * f.ci90_half(0);
    return out;
}

std::string fit_result_to_json(const FitResult& f, std::optional<double> true_r,
                               int dim) {
    nlohmann::json j;
    j["model"] = model_name(f.kind);
    const auto names = model_param_names(f.kind);
    for (size_t i = 0; i < names.size(); ++i) {
        j["theta"][names[i]] = f.theta(static_cast<int>(i));
        j["ci90"][names[i]] = f.ci90_half(static_cast<int>(i));
    }
    j["r_hat"] = f.r_hat(dim);
    j["C"] = 2.0 * f.ci90_half(0);
    if (true_r) {
        const auto ac = accuracy_and_confidence(f, *true_r, dim);
        if (ac.mu)
            j["mu"] = *ac.mu;
        else
            j["mu"] = nullptr;
        j["true_r"] = *true_r;
    }
    j["s2"] = f.s2;
    j["converged"] = f.converged;
    j["iterations"] = f.iterations;
    j["coalesced"] = f.coalesced;
    j["rank_deficient"] = f.rank_deficient;
    j["n_points"] = f.n_points;
    return j.dump(2);
}

std::string to_csv(const DecaySeries& s) {
    std::ostringstream out;
    out << "m,F_mean,F_stderr,K\n";
    for (size_t i = 0; i < s.m.size(); ++i) {
        out << format_double(s.m[i]) << ',' << format_double(s.f_mean[i])
            << ',' << format_double(s.f_stderr[i]) << ',' << s.k << '\n';
    }
    return out.str();
}

DecaySeries series_from_csv(const std::string& csv) {
    DecaySeries s;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ','))
            vals.push_back(std::stod(cell));
        if (vals.size() != 4)
            throw std::invalid_argument("series_from_csv: expected 4 columns");
        s.m.push_back(vals[0]);
        s.f_mean.push_back(vals[1]);
        s.f_stderr.push_back(vals[2]);
        s.k = static_cast<int>(vals[3]);
    }
    return s;
}

}  // namespace rb
