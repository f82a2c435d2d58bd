#include "fit.hpp"

#include "error.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace eoct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Problem {
    const ModelSpec* model;
    const FitData* data;
    std::vector<double> sqrt_w;
    std::vector<int> free_idx; // parameter indices being optimized

    Eigen::VectorXd residuals(std::span<const double> p) const
    {
        const std::size_t n = data->x.size();
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            r[static_cast<Eigen::Index>(i)] =
                sqrt_w[i] * (model->eval(p, data->x[i]) - data->y[i]);
        return r;
    }

    // Finite-difference Jacobian over the free parameters; central where the
    // bounds allow it, one-sided at an active bound.
    Eigen::MatrixXd jacobian(std::vector<double>& p) const
    {
        const std::size_t n = data->x.size();
        const std::size_t m = free_idx.size();
        Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < m; ++k) {
            const int j = free_idx[k];
            const double pj = p[static_cast<std::size_t>(j)];
            double scale = 1.0;
            if (std::isfinite(model->lower[static_cast<std::size_t>(j)]) &&
                std::isfinite(model->upper[static_cast<std::size_t>(j)]))
                scale = model->upper[static_cast<std::size_t>(j)] -
                        model->lower[static_cast<std::size_t>(j)];
            const double h = 1e-6 * std::max({std::abs(pj), 1e-3 * scale, 1e-12});
            const double hi = std::min(pj + h, model->upper[static_cast<std::size_t>(j)]);
            const double lo = std::max(pj - h, model->lower[static_cast<std::size_t>(j)]);
            const double denom = hi - lo;
            if (denom <= 0.0) {
                jac.col(static_cast<Eigen::Index>(k)).setZero();
                continue;
            }
            p[static_cast<std::size_t>(j)] = hi;
            const Eigen::VectorXd r_hi = residuals(p);
            p[static_cast<std::size_t>(j)] = lo;
            const Eigen::VectorXd r_lo = residuals(p);
            p[static_cast<std::size_t>(j)] = pj;
            jac.col(static_cast<Eigen::Index>(k)) = (r_hi - r_lo) / denom;
        }
        return jac;
    }
};

} // namespace

double FitResult::cov(std::size_t i, std::size_t j) const
{
    const std::size_t p = params.size();
    return covariance.empty() ? 0.0 : covariance[i * p + j];
}

FitResult least_squares_fit(const ModelSpec& model, const FitData& data,
                            std::vector<double> init, const LmOptions& opts)
{
    const std::size_t n = data.x.size();
    const std::size_t p = init.size();
    if (!model.eval) fail(Errc::invalid_input, "least_squares_fit: model has no eval");
    if (data.y.size() != n) fail(Errc::invalid_input, "least_squares_fit: x/y size mismatch");
    if (!data.weights.empty() && data.weights.size() != n)
        fail(Errc::invalid_input, "least_squares_fit: weight size mismatch");
    if (model.lower.size() != p || model.upper.size() != p)
        fail(Errc::invalid_input, "least_squares_fit: bounds size mismatch");

    Problem prob;
    prob.model = &model;
    prob.data = &data;
    prob.sqrt_w.resize(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!data.weights.empty()) {
            if (data.weights[i] < 0.0)
                fail(Errc::invalid_input, "least_squares_fit: negative weight");
            prob.sqrt_w[i] = std::sqrt(data.weights[i]);
        }
    }

    std::vector<bool> is_fixed(p, false);
    for (int j : model.fixed) {
        if (j < 0 || static_cast<std::size_t>(j) >= p)
            fail(Errc::invalid_input, "least_squares_fit: fixed index out of range");
        is_fixed[static_cast<std::size_t>(j)] = true;
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (model.lower[j] >= model.upper[j])
            fail(Errc::invalid_input, "least_squares_fit: lower bound >= upper bound");
        if (init[j] < model.lower[j] || init[j] > model.upper[j])
            fail(Errc::invalid_input, "least_squares_fit: initial guess outside bounds");
        if (!is_fixed[j]) prob.free_idx.push_back(static_cast<int>(j));
    }
    const std::size_t m = prob.free_idx.size();
    if (m == 0) fail(Errc::invalid_input, "least_squares_fit: no free parameters");
    if (n < 2 * m)
        fail(Errc::invalid_input, "least_squares_fit: need at least 2x more points than "
                                  "free parameters");

    FitResult res;
    res.params = init;
    Eigen::VectorXd r = prob.residuals(res.params);
    double ssr = r.squaredNorm();
    res.ssr_history.push_back(ssr);
    double lambda = opts.lambda0;

    // Below this floor the residual is dominated by rounding noise in the
    // model evaluation; relative-change tests are meaningless there.
    double y_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        y_scale = std::max(y_scale, std::abs(prob.sqrt_w[i] * data.y[i]));
    const double ssr_floor =
        static_cast<double>(n) * (y_scale * 1e-14) * (y_scale * 1e-14);

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        res.iterations = iter;
        if (ssr == 0.0) {
            res.converged = true;
            break;
        }
        const Eigen::MatrixXd jac = prob.jacobian(res.params);
        const Eigen::VectorXd grad = jac.transpose() * r;
        const Eigen::MatrixXd jtj = jac.transpose() * jac;

        // Solve in the diag-normalized basis: parameters carry wildly
        // different units (Hz next to dimensionless fractions), and the raw
        // normal matrix can be numerically rank-deficient purely from
        // scaling. The scaled system has a unit diagonal, and lambda * I
        // there is exactly the lambda * diag(JtJ) damping in the original.
        Eigen::VectorXd scale = jtj.diagonal();
        for (Eigen::Index k = 0; k < scale.size(); ++k)
            scale[k] = scale[k] > 0.0 ? std::sqrt(scale[k]) : 1.0;
        Eigen::MatrixXd a_scaled(jtj.rows(), jtj.cols());
        for (Eigen::Index a = 0; a < jtj.rows(); ++a)
            for (Eigen::Index b = 0; b < jtj.cols(); ++b)
                a_scaled(a, b) = jtj(a, b) / (scale[a] * scale[b]);
        Eigen::VectorXd g_scaled = grad.cwiseQuotient(scale);

        bool accepted = false;
        while (lambda <= 1e14) {
            Eigen::MatrixXd a = a_scaled;
            a.diagonal().array() += lambda;
            // Minimum-norm solve; keeps rank-deficient updates deterministic.
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
            const Eigen::VectorXd delta = cod.solve(-g_scaled).cwiseQuotient(scale);

            std::vector<double> trial = res.params;
            double pnorm2 = 0.0, dnorm2 = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t j = static_cast<std::size_t>(prob.free_idx[k]);
                double v = trial[j] + delta[static_cast<Eigen::Index>(k)];
                v = std::clamp(v, model.lower[j], model.upper[j]);
                dnorm2 += (v - trial[j]) * (v - trial[j]);
                pnorm2 += trial[j] * trial[j];
                trial[j] = v;
            }
            const Eigen::VectorXd r_try = prob.residuals(trial);
            const double ssr_try = r_try.squaredNorm();
            if (std::isfinite(ssr_try) && ssr_try <= ssr) {
                const double step_rel = std::sqrt(dnorm2) / (std::sqrt(pnorm2) + 1e-300);
                const double res_rel = (ssr - ssr_try) / std::max(ssr, 1e-300);
                res.params = trial;
                r = r_try;
                ssr = ssr_try;
                res.ssr_history.push_back(ssr);
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
                // A short, barely-improving step only counts as converged once
                // the damping has relaxed back to the Gauss-Newton regime;
                // heavily damped steps are short regardless of distance from
                // the optimum.
                if (step_rel < opts.step_tol &&
                    (res_rel < opts.residual_tol || ssr <= ssr_floor) &&
                    lambda <= opts.lambda0)
                    res.converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // Damping saturated without an acceptable step: we are at a
            // stationary point within evaluation precision.
            const double gscale = grad.cwiseAbs().maxCoeff();
            res.converged = gscale <= 1e-8 * std::max(1.0, ssr);
            if (!res.converged)
                res.warnings.push_back("damping saturated before meeting tolerances");
            break;
        }
        if (res.converged) break;
    }
    if (!res.converged && res.iterations >= opts.max_iterations)
        res.warnings.push_back("maximum iterations reached");
    res.residual_norm = ssr;

    // Linearized covariance at the optimum. sigma^2 is estimated from the
    // residuals; parameters along a Jacobian null space get infinite CI.
    const Eigen::MatrixXd jac = prob.jacobian(res.params);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    const double tol = std::max(smax, 1.0) * 1e-12;
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv[k] > tol) ++rank;
    res.rank_deficient = rank < static_cast<Eigen::Index>(m);

    std::vector<bool> bad(m, false);
    if (res.rank_deficient) {
        const Eigen::MatrixXd v = svd.matrixV();
        for (Eigen::Index k = rank; k < sv.size(); ++k)
            for (std::size_t j = 0; j < m; ++j)
                if (v(static_cast<Eigen::Index>(j), k) * v(static_cast<Eigen::Index>(j), k) >
                    0.25)
                    bad[j] = true;
        for (std::size_t j = 0; j < m; ++j)
            if (bad[j]) res.unidentifiable.push_back(prob.free_idx[j]);
        res.warnings.push_back("rank-deficient Jacobian: some parameters unidentifiable");
    }

    const double dof = static_cast<double>(n) - static_cast<double>(rank);
    const double sigma2 = dof > 0.0 ? ssr / dof : kInf;
    const Eigen::MatrixXd v = svd.matrixV();
    Eigen::MatrixXd cov_free = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                     static_cast<Eigen::Index>(m));
    for (Eigen::Index k = 0; k < rank; ++k)
        cov_free += (1.0 / (sv[k] * sv[k])) * v.col(k) * v.col(k).transpose();
    cov_free *= sigma2;

    res.covariance.assign(p * p, 0.0);
    res.ci95.assign(p, 0.0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            res.covariance[static_cast<std::size_t>(prob.free_idx[a]) * p +
                           static_cast<std::size_t>(prob.free_idx[b])] =
                cov_free(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    for (std::size_t a = 0; a < m; ++a) {
        const std::size_t j = static_cast<std::size_t>(prob.free_idx[a]);
        res.ci95[j] = bad[a] ? kInf : 1.96 * std::sqrt(std::max(res.covariance[j * p + j], 0.0));
        if (!std::isfinite(sigma2)) res.ci95[j] = kInf;
    }
    return res;
}

} // namespace eoct
