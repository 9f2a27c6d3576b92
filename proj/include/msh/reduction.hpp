#ifndef MSH_REDUCTION_HPP
#define MSH_REDUCTION_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "msh/cell.hpp"
#include "msh/coefficient.hpp"
#include "msh/elliptic.hpp"
#include "msh/fit.hpp"
#include "msh/grid.hpp"

namespace msh {

/// Reperiodization plus a slow-point lattice of reiterated cell solves:
/// the sampled reduced kernel A_flat = effective field of A_sharp, and exact
/// access to the sharp corrector gradient. Interval problems (d=1) only; the
/// slow lattice has slow_m^(n'-1) points, interpolated trigonometrically.
class SharpTable {
  public:
    static SharpTable build(const MultiscaleCoefficient& coef, double Q, int slow_m = 32,
                            int threads = 1, int fast_factor = 64);

    const ReperiodizationResult& rep() const { return rep_; }
    const std::vector<double>& new_scales() const { return rep_.new_scales; }
    int slow_dims() const { return slow_dims_; }
    int lattice_points() const { return static_cast<int>(a_hat_.size()); }

    /// effective coefficient of the reduced equation at spatial point x
    double a_flat_x(double x) const;
    /// homogenized value at given slow fractions (unit torus coordinates)
    double a_hat_at(const double* slow_fracs) const;
    /// sharp corrector derivative: slow slots from z, fast slot from x
    double grad_chi(double z, double x) const;
    /// corrector grid samples at a lattice index (for persistence)
    const CorrectorField& corrector(int k) const { return correctors_[k]; }

  private:
    ReperiodizationResult rep_;
    int slow_dims_ = 0;
    int m_ = 32;
    std::vector<double> a_hat_;  // row-major over the slow lattice
    std::vector<CorrectorField> correctors_;
    // precomputed interpolation coefficients: one series for a single slow
    // dimension, per-row series along the second dimension for two
    std::vector<double> series_;             // (m/2+1) cos + sin pairs
    std::vector<std::vector<double>> rows_;  // per j1, series along dim 2
    static std::vector<double> build_series(const double* samples, int m);
    static double eval_series(const std::vector<double>& coef, int m, double t);
    double eval_trig_1d(const double* samples, double t) const;
};

struct ReductionReport {
    double Q = 0.0;
    std::int64_t q = 0;
    int n = 0;  // scales of the input coefficient
    double tau = 1.0;
    std::vector<double> new_scales;
    double eps_n = 0.0;
    double r = 0.0, r_solve = 0.0;
    double h = 0.0;
    int slow_lattice = 0;
    double norm_grad_ue = 0.0;     // ||grad u_eps||_L2(B_r)
    double norm_grad_ue_2r = 0.0;  // ||grad u_eps||_L2(B_2r)
    double norm_grad_uflat = 0.0;  // ||grad u_flat||_L2(B_r)
    double norm_F_2r = 0.0;
    double error = 0.0;            // || grad u_eps - grad u_flat - U ||_L2(B_r)
    double energy_constant = 0.0;  // measured C in the energy inequality
    double sigma_hat = std::nan("");  // filled by family fits
    double bound_proxy = 0.0;         // (Q^{n-1} eps_n / r)^sigma + Q^{-tau}
};

struct ReductionOptions {
    double h = 0.0;           // 0 selects eps_n / grid_factor
    double grid_factor = 32;  // cells per finest period when h == 0
    int slow_m = 32;
    int fast_factor = 64;  // corrector table samples per compressed period
    double center = 0.5;
    double solve_radius_factor = 1.5;  // u_flat solved on B_{factor * r}
    int threads = 1;
    bool allow_unresolved = false;
    bool keep_correctors = false;
    double sigma_for_proxy = 1.0;
};

struct ReductionResult {
    GridField u_eps, u_flat, U;
    ReductionReport report;
};

/// One-scale reduction on the interval: reperiodize at Q, homogenize the
/// finest sharp scale over a slow lattice, solve the reduced problem around
/// the center with boundary data taken from u_eps, assemble the corrector
/// term, and measure the gradient approximation error on B_r.
ReductionResult reduce_one_scale(const MultiscaleCoefficient& coef, const ScalarFn& F, double r,
                                 double Q, const ReductionOptions& opt = {});

/// The smoothed corrector term
///   U(x) = (eps_n')^{-d} int phi((x-z)/eps_n') grad_chi(z/eps', x/eps_n')
///          grad u_flat(z) dz,
/// with grad u_flat extended by zero outside its grid.
GridField corrector_term_U(const SharpTable& table, const GridField& u_flat,
                           const std::vector<double>& new_scales, int threads = 1);

struct ReductionFamilyResult {
    std::vector<ReductionReport> reports;
    double gamma_hat = 0.0;  // slope of error vs eps_n
    double sigma_hat = 0.0;  // slope of error vs Q^{n-1} eps_n / r
    bool nonincreasing = false;  // within 10% slack
};

/// Runs the reduction along a scale family with the schedule
/// Q = (r/eps_n)^(theta/(n-1)) and fits the decay exponents.
ReductionFamilyResult reduce_family(const std::vector<MultiscaleCoefficient>& family,
                                    const ScalarFn& F, double r, double theta,
                                    const ReductionOptions& opt = {});

struct RateRow {
    double eps = 0.0;
    double h = 0.0;
    double l2_err = 0.0;    // ||u_eps - u_0||_L2
    double grad_err = 0.0;  // corrected gradient error
    double layer = 0.0;     // ||grad u_0||_L2(Omega_4eps)
};

struct RateTable {
    std::vector<RateRow> rows;
    double slope_l2 = std::nan("");
    double slope_grad = std::nan("");
    double r2_l2 = 0.0, r2_grad = 0.0;
    bool flagged = false;  // errors at solver tolerance; no order claimed
};

using LocallyPeriodic1D = std::function<double(double x, double y)>;

/// Locally periodic convergence-rate study on [0,1]: solves the oscillating
/// and homogenized problems per eps, forms the smoothed first-order corrector
/// approximation, and fits both error slopes.
RateTable rate_locally_periodic(const LocallyPeriodic1D& a, double lambda,
                                const std::vector<double>& eps_list, const ScalarFn& F,
                                int grid_factor = 64);

}  // namespace msh

#endif
