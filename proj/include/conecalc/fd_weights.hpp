#pragma once

#include <cstddef>
#include <vector>

namespace conecalc {

// Finite-difference weights for the m-th derivative at point z from the
// arbitrary nodes x, by Fornberg's recurrence. Exact for polynomials of
// degree x.size()-1, so a 6-node window gives a 4th-order second derivative
// even at skewed offsets.
inline std::vector<double> fd_weights(double z, const std::vector<double>& x, int m) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        int mn = static_cast<int>(i) < m ? static_cast<int>(i) : m;
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

}  // namespace conecalc
