#ifndef MSH_CELL_HPP
#define MSH_CELL_HPP

#include <functional>
#include <utility>
#include <vector>

#include "msh/coefficient.hpp"
#include "msh/common.hpp"
#include "msh/krylov.hpp"

namespace msh {

/// Corrector samples on a uniform periodic grid over [0,1)^d, nodes at i*h.
/// values[j] holds chi_j, gradient[j] its gradient (components interleaved).
struct CorrectorField {
    int d = 1;
    int ncell = 0;
    double h = 0.0;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> gradient;
    std::vector<double> mean_residual;  // |cell average of chi_j|
    std::vector<double> energy;         // ||grad chi_j||_{L2(Y)}
};

struct EffectiveMatrix {
    Mat value;
    double h = 0.0;          // provenance: resolution
    double solver_tol = 0.0;
    int iterations = 0;
};

using Scalar1D = std::function<double(double)>;
using MatField2D = std::function<Mat(double, double)>;

/// d=1 cell problem. The effective coefficient is the harmonic mean
/// (integral of 1/a by adaptive quadrature) and the corrector derivative is
/// a_hat/a - 1, integrated up with a mean-zero shift.
std::pair<CorrectorField, EffectiveMatrix> solve_cell_1d(const Scalar1D& a, int n_grid = 1024,
                                                         double quad_tol = 1e-12);

/// d=2 cell problem on T^2, conservative finite differences on a staggered
/// flux grid (coefficient at face midpoints), periodic wrap, mean-zero
/// projection after the Krylov solve.
std::pair<CorrectorField, EffectiveMatrix> solve_cell_2d(const MatField2D& A, double h,
                                                         const KrylovOptions& opt = {});

/// Reiterated effective field: for each slow point (y_1,..,y_{n-1}) the
/// finest scale is homogenized with the slow arguments frozen, giving a
/// sampled representation of the (n-1)-scale kernel.
struct ReiteratedTable {
    int d = 1;
    int n = 0;  // scales of the input coefficient
    std::vector<std::vector<Vec>> slow_points;
    std::vector<EffectiveMatrix> effective;
    std::vector<CorrectorField> correctors;
};

ReiteratedTable reiterated_effective(const MultiscaleCoefficient& coef,
                                     const std::vector<std::vector<Vec>>& slow_points, double h,
                                     int threads = 1, bool keep_correctors = true);

}  // namespace msh

#endif
