#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

namespace cpir::detail {

/// Euclidean projection onto the probability simplex (sort-based).
inline void project_to_simplex(std::span<double> v) {
    if (v.empty()) return;
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cumulative += u[i];
        const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    for (double& x : v) x = std::max(0.0, x - theta);
}

}  // namespace cpir::detail
