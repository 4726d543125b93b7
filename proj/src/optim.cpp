#include "pathways/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pathways::optim {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start,
                          const SimplexOptions& opts) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        const double step = i < opts.initial_step.size() ? opts.initial_step[i] : 0.1;
        pts[i + 1][i] += step;
    }
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    SimplexResult res;
    auto point_along = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double coef) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + coef * (worst[k] - centroid[k]);
        return p;
    };

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const auto& best = pts[order[0]];

        double size = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::fabs(pts[order[i]][k] - best[k]));
        if (size <= opts.size_tolerance && std::isfinite(vals[order[0]])) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[order[i]][k] / static_cast<double>(n);

        const std::size_t w = order[n];
        const auto reflected = point_along(centroid, pts[w], -1.0);
        const double fr = f(reflected);
        if (fr < vals[order[0]]) {
            const auto expanded = point_along(centroid, pts[w], -2.0);
            const double fe = f(expanded);
            if (fe < fr) { pts[w] = expanded; vals[w] = fe; }
            else { pts[w] = reflected; vals[w] = fr; }
            continue;
        }
        if (fr < vals[order[n - 1]]) {
            pts[w] = reflected; vals[w] = fr;
            continue;
        }
        const bool outside = fr < vals[w];
        const auto contracted = point_along(centroid, outside ? reflected : pts[w], 0.5);
        const double fc = f(contracted);
        if (fc < (outside ? fr : vals[w])) {
            pts[w] = contracted; vals[w] = fc;
            continue;
        }
        // shrink toward best
        for (std::size_t i = 1; i <= n; ++i) {
            auto& p = pts[order[i]];
            for (std::size_t k = 0; k < n; ++k) p[k] = best[k] + 0.5 * (p[k] - best[k]);
            vals[order[i]] = f(p);
        }
    }
    const auto best_it = std::min_element(vals.begin(), vals.end());
    res.x = pts[static_cast<std::size_t>(best_it - vals.begin())];
    res.value = *best_it;
    res.iterations = it;
    return res;
}

} // namespace pathways::optim
