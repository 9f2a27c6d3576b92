#ifndef MSH_ELLIPTIC_HPP
#define MSH_ELLIPTIC_HPP

#include <functional>
#include <vector>

#include "msh/coefficient.hpp"
#include "msh/grid.hpp"
#include "msh/krylov.hpp"

namespace msh {

using ScalarFn = std::function<double(const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;
using MatFn = std::function<Mat(const Vec&)>;

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 100000;
    bool allow_unresolved = false;  // override the h <= eps_n/8 guard
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
    double grad_l2 = 0.0;      // ||grad u||_L2
    double energy_bound = 0.0; // (||f|| + C_P ||F||) / Lambda, with discrete Poincare C_P
};

struct Rect {
    double lo[2] = {0.0, 0.0};
    double hi[2] = {1.0, 1.0};
};

/// Flux-form finite differences for -div(A grad u) = div f + F on a
/// rectangle with Dirichlet data g: coefficient and f sampled at face
/// midpoints, cross terms by averaged tangential differences. d=1 solves the
/// tridiagonal system directly; d=2 runs Jacobi-PCG (BiCGSTAB when A has
/// off-diagonal entries).
GridField solve_dirichlet_raw(int dim, const MatFn& A, const ScalarFn& F, const VectorFn& f,
                              const ScalarFn& g, const Rect& rect, double h,
                              const SolveOptions& opt = {}, SolveStats* stats = nullptr,
                              double lambda = 1.0);

/// Same on the unit domain with A = coef evaluated multiscale; refuses grids
/// that do not resolve the finest scale (h <= eps_n/8) unless overridden.
GridField solve_dirichlet(const MultiscaleCoefficient& coef, const ScalarFn& F, const VectorFn& f,
                          double h, const SolveOptions& opt = {}, SolveStats* stats = nullptr,
                          const ScalarFn& g = {});

/// Second-order central differences inside, first-order one-sided at the
/// boundary.
GridField gradient(const GridField& u);

/// Adapters so sampled fields can stand in for forcing expressions.
ScalarFn field_as_scalar(const GridField& f);
VectorFn field_as_vector(const GridField& f);

struct RefineResult {
    std::vector<double> h;
    std::vector<double> diff;  // ||u_{h_k} - u_{h_{k+1}}||_L2, k = 0..m-2
    double order = 0.0;
    double r2 = 0.0;
    bool order_claimed = false;
};

/// Observed convergence order from successive grid differences; refuses to
/// claim an order when the differences are noisy or vanish.
RefineResult refine_study(const std::function<GridField(double)>& solve,
                          const std::vector<double>& h_list);

}  // namespace msh

#endif
