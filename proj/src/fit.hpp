#ifndef EOCT_FIT_HPP
#define EOCT_FIT_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace eoct {

// A scalar model y = f(params, x) with box bounds and optionally frozen
// parameters. The initial guess must lie inside the bounds.
struct ModelSpec {
    std::function<double(std::span<const double>, double)> eval;
    std::vector<std::string> names;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<int> fixed; // indices held at their initial value
};

struct FitData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> weights; // optional; empty means uniform
};

struct LmOptions {
    int max_iterations = 200;
    double lambda0 = 1e-3;     // initial damping; x10 on reject, /10 on accept
    double step_tol = 1e-10;   // relative step size
    double residual_tol = 1e-12; // relative residual-norm change
};

struct FitResult {
    std::vector<double> params;
    std::vector<double> ci95;       // half-widths; +inf where unidentifiable
    std::vector<double> covariance; // row-major p x p, linearized at optimum
    double residual_norm = 0.0;     // weighted sum of squared residuals
    int iterations = 0;
    bool converged = false;
    bool rank_deficient = false;
    std::vector<int> unidentifiable; // parameter indices spanning a null space
    std::vector<double> ssr_history; // residual norm after each accepted step
    std::vector<std::string> warnings;

    double cov(std::size_t i, std::size_t j) const;
};

// Damped Gauss-Newton descent. Accepted steps never increase the residual
// norm and the whole iteration is deterministic for identical inputs.
// Rank-deficient steps fall back to the minimum-norm solution.
FitResult least_squares_fit(const ModelSpec& model, const FitData& data,
                            std::vector<double> init, const LmOptions& opts = {});

} // namespace eoct

#endif
