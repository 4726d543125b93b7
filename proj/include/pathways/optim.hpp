#ifndef PATHWAYS_OPTIM_HPP
#define PATHWAYS_OPTIM_HPP

#include <functional>
#include <vector>

namespace pathways::optim {

struct SimplexOptions {
    int max_iterations = 2000;
    double size_tolerance = 1e-8;      // max vertex distance from best, infinity norm
    std::vector<double> initial_step;  // per-coordinate; defaults to 0.1
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Derivative-free minimisation (Nelder-Mead, standard coefficients).
// The objective may return +inf to reject a point.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start,
                          const SimplexOptions& opts = {});

} // namespace pathways::optim

#endif // PATHWAYS_OPTIM_HPP
