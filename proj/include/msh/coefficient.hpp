#ifndef MSH_COEFFICIENT_HPP
#define MSH_COEFFICIENT_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "msh/common.hpp"
#include "msh/diophantine.hpp"
#include "msh/errors.hpp"
#include "msh/expr.hpp"

namespace msh {

/// Declared smoothness in the slow arguments y_1..y_{n-1}: the kernel is
/// assumed (and spot-checked, never proven) to satisfy
/// |A(y) - A(y')| <= L (sum |y_i - y_i'|)^tau.
struct HolderData {
    double tau = 1.0;
    double L = 50.0;
};

using Kernel = std::function<Mat(std::span<const Vec>)>;

/// The object A_eps: a matrix kernel on (T^cell_dim)^n plus the scale vector,
/// evaluated as A(x/eps_1, ..., x/eps_n). Immutable after construction and
/// safe to share across sweep workers.
struct MultiscaleCoefficient {
    Kernel kernel;
    std::vector<double> scales;  // nonincreasing, positive
    int dim = 1;                 // spatial dimension, matrix is dim x dim
    int cell_dim = 1;            // dimension of each periodic argument
    double lambda = 1.0;         // ellipticity constant in (0,1]
    HolderData holder;

    int n_scales() const { return static_cast<int>(scales.size()); }

    /// A(frac(x/eps_1), ..., frac(x/eps_n)); the reduction mod 1 happens in
    /// x/eps space so large ratios do not wash out the periodic phase.
    Mat eval(const Vec& x) const;
    double eval_scalar(double x) const;  // d=1 shorthand, returns a(x)
};

/// Builds a coefficient from a parsed kernel expression. The expression may
/// reference at most scales.size() periodic arguments.
MultiscaleCoefficient make_coefficient(CoefficientExpr expr, std::vector<double> scales, int dim,
                                       double lambda, HolderData holder = {}, int cell_dim = 0);

struct ReperiodizationResult {
    MultiscaleCoefficient sharp;      // A_sharp, 1-periodic in every argument
    std::vector<double> new_scales;   // matches sharp.scales
    RationalApproximation approx;     // (q, p_i, gamma_i, s_i) on eps_n/eps_i
    std::vector<int> dropped;         // original slow indices with gamma_i = 0
};

/// Rewrites A at scales (eps_1 >= ... >= eps_n) as
///   A_sharp(y_1,..,y_n) = A(s_1 y_1 + p_1 y_n, ..., s_{n-1} y_{n-1} + p_{n-1} y_n, q y_n)
/// at scales eps_i' = eps_n/gamma_i (slow, re-sorted) and eps_n' = q eps_n,
/// so that eval(A, x) == eval(A_sharp, x) pointwise and the new finest scale
/// is Q-separated from every other: 1/(q gamma_i) >= Q.
ReperiodizationResult reperiodize(const MultiscaleCoefficient& coef, double Q,
                                  std::int64_t cap = kDefaultDenominatorCap);

/// Lifts a quasiperiodic field B(Mx/eps), with B 1-periodic on T^N and M an
/// N x d frequency matrix, into a periodic coefficient with up to N*d scales
/// eps/|M_ij| (zero entries dropped). No Diophantine condition on M is used.
MultiscaleCoefficient lift_quasiperiodic(const MultiscaleCoefficient& B,
                                         const std::vector<std::vector<double>>& M, double eps);

struct SampleReport {
    bool pass = false;
    double min_rayleigh = 0.0;     // min over samples of xi.A xi / |xi|^2
    double max_gain = 0.0;         // max over samples of |A xi| / |xi|
    double max_discrepancy = 0.0;  // max |A(y+z) - A(y)| over integer shifts
    int n_samples = 0;
};

/// Monte Carlo spot checks of the structural assumptions (never proofs).
SampleReport check_ellipticity(const MultiscaleCoefficient& coef, int n_samples,
                               std::uint64_t seed);
SampleReport check_periodicity(const MultiscaleCoefficient& coef, int n_samples,
                               std::uint64_t seed);
/// Empirical Hoelder quotient in the slow arguments against declared (tau,L).
SampleReport check_holder(const MultiscaleCoefficient& coef, int n_samples, std::uint64_t seed);

}  // namespace msh

#endif
