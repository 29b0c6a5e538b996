#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fracsync/types.hpp"

namespace testutil {

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(fracsync::Vec a, fracsync::Vec b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Rejection threshold of the two-sample KS test at the 1% level.
inline double ks_threshold_1pct(std::size_t na, std::size_t nb) {
    const double c = 1.62762;  // sqrt(-ln(0.005)/2)
    return c * std::sqrt(static_cast<double>(na + nb) /
                         (static_cast<double>(na) * static_cast<double>(nb)));
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.
inline fracsync::Vec symmetric_eigenvalues(std::vector<fracsync::Vec> m) {
    const std::size_t n = m.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(m[p][q]) < 1e-300) continue;
                const double theta = 0.5 * (m[q][q] - m[p][p]) / m[p][q];
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    fracsync::Vec eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = m[i][i];
    return eig;
}

}  // namespace testutil
