#ifndef MSH_FIT_HPP
#define MSH_FIT_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "msh/errors.hpp"

namespace msh {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;  // log-intercept
    double r2 = 0.0;
};

/// Ordinary least squares on (log scale, log error) pairs.
inline FitResult fit_rate(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3) throw InvalidInput("fit_rate needs at least 3 pairs");
    for (const auto& [s, e] : pairs)
        if (!(s > 0.0) || !(e > 0.0))
            throw DegenerateFit("fit_rate: scales and errors must be positive");

    const double n = static_cast<double>(pairs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [s, e] : pairs) {
        double x = std::log(s), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-14) throw DegenerateFit("fit_rate: degenerate abscissae");
    FitResult out;
    out.slope = (n * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (const auto& [s, e] : pairs) {
        double r = std::log(e) - (out.intercept + out.slope * std::log(s));
        ss_res += r * r;
    }
    out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

}  // namespace msh

#endif
