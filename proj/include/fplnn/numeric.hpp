#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "fplnn/errors.hpp"

namespace fplnn {

struct BisectionResult {
    double root = 0.0;
    double residual = 0.0;  ///< |r(root)|
    double width = 0.0;     ///< final bracket width
    std::size_t iterations = 0;
};

/// Bisection on a bracket with r(lo)·r(hi) ≤ 0.
///
/// Stops once the bracket is no wider than `tol` and |r(mid)| ≤ `tol`, when
/// the bracket can no longer shrink in floating point, or after `max_iter`
/// halvings.
inline BisectionResult bisect(const std::function<double(double)>& r, double lo, double hi, double tol,
                              std::size_t max_iter = 200) {
    double r_lo = r(lo);
    const double r_hi = r(hi);
    if (r_lo == 0.0) return {lo, 0.0, hi - lo, 0};
    if (r_hi == 0.0) return {hi, 0.0, hi - lo, 0};
    if ((r_lo > 0.0) == (r_hi > 0.0)) {
        throw InvalidInput("bisect: no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    BisectionResult out;
    for (std::size_t it = 0; it < max_iter; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        const double r_mid = r(mid);
        out = {mid, std::abs(r_mid), hi - lo, it + 1};
        if (r_mid == 0.0) return out;
        if ((hi - lo) <= tol && std::abs(r_mid) <= tol) return out;
        if (mid <= lo || mid >= hi) return out;
        if ((r_mid > 0.0) == (r_lo > 0.0)) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }
    return out;
}

}  // namespace fplnn
