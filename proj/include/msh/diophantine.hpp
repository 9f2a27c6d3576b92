#ifndef MSH_DIOPHANTINE_HPP
#define MSH_DIOPHANTINE_HPP

#include <cstdint>
#include <vector>

#include "msh/errors.hpp"

namespace msh {

/// Simultaneous rational approximation p_i/q of a list of reals, together
/// with the residuals and their signs. Valid outputs satisfy
///   1 <= q < ceil(Q^m),   max_i gamma_i < 1/(qQ),
/// with gamma_i = |alpha_i - p_i/q| and s_i = sgn(alpha_i - p_i/q).
struct RationalApproximation {
    std::int64_t q = 1;
    std::vector<std::int64_t> p;
    std::vector<double> gamma;
    std::vector<int> s;  // -1, 0, +1; exactly 0 iff gamma_i == 0 (tol 1e-14)
    double Q = 0.0;
};

struct ApproxCertificate {
    bool ok = false;
    double worst_scaled_residual = 0.0;  // max_i q*Q*gamma_i, must be < 1
    std::int64_t q_bound = 0;            // ceil(Q^m)
};

inline constexpr std::int64_t kDefaultDenominatorCap = 10'000'000;
inline constexpr double kZeroResidualTol = 1e-14;

/// Smallest q realizing Dirichlet's simultaneous approximation bound for
/// alphas in [0,1]^m and Q > 1. Linear scan over q with p_i = round(q*alpha_i)
/// (ties to even), so identical inputs always produce identical outputs.
/// Throws InvalidInput on domain violations and CapExceeded when ceil(Q^m)
/// exceeds `cap`.
RationalApproximation simultaneous_approx(const std::vector<double>& alphas, double Q,
                                          std::int64_t cap = kDefaultDenominatorCap);

/// Re-checks all approximation invariants against the given inputs.
ApproxCertificate verify_approx(const RationalApproximation& approx,
                                const std::vector<double>& alphas, double Q);

}  // namespace msh

#endif
