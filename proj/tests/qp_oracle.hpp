#ifndef PSPACE_TEST_QP_ORACLE_HPP
#define PSPACE_TEST_QP_ORACLE_HPP

#include <cmath>
#include <vector>

namespace testutil {

// Brute-force dense solver for min 1/2 a'Qa + p'a s.t. y'a = 0,
// 0 <= a_i <= C: projected gradient descent with an exact projection
// onto the box-hyperplane intersection (bisection on the multiplier).
// Independent of the SMO implementation under test.
inline std::vector<double> qp_solve(const std::vector<double>& Q, const std::vector<double>& p,
                                    const std::vector<int>& y, double C, int iters = 50000) {
    const int n = static_cast<int>(p.size());
    auto project = [&](std::vector<double>& v) {
        double lo = -1e6, hi = 1e6;
        for (int it = 0; it < 200; ++it) {
            double nu = 0.5 * (lo + hi);
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                double ai = std::clamp(v[i] - nu * y[i], 0.0, C);
                sum += y[i] * ai;
            }
            if (sum > 0)
                lo = nu;
            else
                hi = nu;
        }
        double nu = 0.5 * (lo + hi);
        for (int i = 0; i < n; ++i) v[i] = std::clamp(v[i] - nu * y[i], 0.0, C);
    };

    double lipschitz = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(Q[static_cast<size_t>(i) * n + j]);
        lipschitz = std::max(lipschitz, row);
    }
    double step = 1.0 / std::max(1.0, lipschitz);

    std::vector<double> a(n, 0.0), g(n);
    project(a);
    for (int it = 0; it < iters; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = p[i];
            for (int j = 0; j < n; ++j) s += Q[static_cast<size_t>(i) * n + j] * a[j];
            g[i] = s;
        }
        for (int i = 0; i < n; ++i) a[i] -= step * g[i];
        project(a);
    }
    return a;
}

inline double qp_objective(const std::vector<double>& Q, const std::vector<double>& p,
                           const std::vector<double>& a) {
    const int n = static_cast<int>(p.size());
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += Q[static_cast<size_t>(i) * n + j] * a[j];
        obj += 0.5 * a[i] * s + p[i] * a[i];
    }
    return obj;
}

} // namespace testutil

#endif
