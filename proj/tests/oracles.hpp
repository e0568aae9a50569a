#pragma once

// Independent numerical oracles used by the test suites. Everything here is
// deliberately written from first principles (Taylor series, fine-step
// integration, finite differences, exhaustive search) so that it shares no
// code path with the library implementation it checks.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

// 30-term Taylor series with pre-scaling: exp(A) = (exp(A/2^k))^(2^k).
template <int N>
Eigen::Matrix<double, N, N> taylor_expm(Eigen::Matrix<double, N, N> a) {
    using Mat = Eigen::Matrix<double, N, N>;
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int k = 0;
    while (norm1 / std::exp2(static_cast<double>(k)) > 0.0625) ++k;
    a /= std::exp2(static_cast<double>(k));

    Mat sum = Mat::Identity();
    Mat term = Mat::Identity();
    for (int i = 1; i <= 30; ++i) {
        term = (term * a) / static_cast<double>(i);
        sum += term;
    }
    for (int i = 0; i < k; ++i) sum = sum * sum;
    return sum;
}

// Fine-step RK4 integration of x' = A x + B u with u held constant.
inline Eigen::Matrix<double, 5, 1> integrate_held(
    const Eigen::Matrix<double, 5, 5>& a, const Eigen::Matrix<double, 5, 2>& b,
    Eigen::Matrix<double, 5, 1> x, const Eigen::Matrix<double, 2, 1>& u,
    double horizon, double dt) {
    const long steps = std::lround(horizon / dt);
    auto deriv = [&](const Eigen::Matrix<double, 5, 1>& s) {
        return (a * s + b * u).eval();
    };
    for (long i = 0; i < steps; ++i) {
        const auto k1 = deriv(x);
        const auto k2 = deriv(x + 0.5 * dt * k1);
        const auto k3 = deriv(x + 0.5 * dt * k2);
        const auto k4 = deriv(x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

// Central finite difference of a scalar field over R^5.
inline Eigen::Matrix<double, 1, 5> central_diff(
    const std::function<double(const Eigen::Matrix<double, 5, 1>&)>& f,
    const Eigen::Matrix<double, 5, 1>& x, double step) {
    Eigen::Matrix<double, 1, 5> g;
    for (int i = 0; i < 5; ++i) {
        Eigen::Matrix<double, 5, 1> hi = x, lo = x;
        hi(i) += step;
        lo(i) -= step;
        g(i) = (f(hi) - f(lo)) / (2.0 * step);
    }
    return g;
}

struct GridSearchResult {
    double u = 0.0;
    bool feasible = false;
};

// Exhaustive scalar QP oracle: minimize 0.5*(u-ref)^2 subject to
// slope_i*u + intercept_i <= 0 over a uniform grid. If no grid point is
// feasible, returns the point minimizing the maximum constraint violation.
inline GridSearchResult grid_search_qp(double ref,
                                       const std::vector<std::pair<double, double>>& cons,
                                       double lo = -5.0, double hi = 5.0,
                                       double res = 1e-4) {
    const long n = std::lround((hi - lo) / res);
    GridSearchResult best;
    double best_obj = std::numeric_limits<double>::infinity();
    double best_viol = std::numeric_limits<double>::infinity();
    double best_viol_u = lo;
    for (long i = 0; i <= n; ++i) {
        const double u = lo + static_cast<double>(i) * res;
        double viol = 0.0;
        for (const auto& [slope, intercept] : cons) {
            viol = std::max(viol, slope * u + intercept);
        }
        if (viol <= 0.0) {
            const double obj = 0.5 * (u - ref) * (u - ref);
            if (obj < best_obj) {
                best_obj = obj;
                best.u = u;
                best.feasible = true;
            }
        } else if (viol < best_viol) {
            best_viol = viol;
            best_viol_u = u;
        }
    }
    if (!best.feasible) best.u = best_viol_u;
    return best;
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace oracles
