#include "mfl/hungarian.hpp"

#include <limits>

#include "mfl/errors.hpp"

namespace mfl {

std::vector<std::size_t> solve_assignment(const DenseMatrix& cost) {
    const std::size_t n = cost.rows();
    if (n == 0 || cost.cols() != n) throw ArgumentError("solve_assignment: cost matrix must be square and nonempty");
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // 1-based arrays; index 0 is a virtual column used to start each augmentation.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> col(n);
    for (std::size_t j = 1; j <= n; ++j) col[match[j] - 1] = j - 1;
    return col;
}

}  // namespace mfl
