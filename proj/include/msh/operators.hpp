#ifndef MSH_OPERATORS_HPP
#define MSH_OPERATORS_HPP

#include <functional>
#include <vector>

#include "msh/common.hpp"
#include "msh/grid.hpp"

namespace msh {

/// The standard bump: phi(x) = c_d exp(-1/(1-4|x|^2)) on |x| < 1/2, zero
/// outside, normalized to unit mass by quadrature at construction.
struct Mollifier {
    int d = 1;
    double norm_const = 0.0;

    explicit Mollifier(int dim);
    double operator()(const Vec& x) const { return eval_r2(dot(x, x)); }
    double eval_r2(double r2) const {
        if (r2 >= 0.25) return 0.0;
        return norm_const * std::exp(-1.0 / (1.0 - 4.0 * r2));
    }
    /// integral of phi over the ball, recomputed by quadrature (certificate)
    double mass_by_quadrature() const;
};

using TwoSlotKernel = std::function<double(const Vec& z, const Vec& y)>;

/// Partial-smoothing operator: mollifies the slow slot only,
///   S_eps(g^eps)(x) = eps^{-d} int g(z, x/eps) phi((x-z)/eps) dz,
/// by quadrature on the field's grid. Discrete mollifier weights are
/// normalized to unit mass over the part of the ball inside the domain
/// (zero-extension convention near the boundary).
GridField smooth_partial(const TwoSlotKernel& g, double eps, const GridField& grid_ctx);

/// Averaging operator M_t[f](x) = (avg over B_t(x) of |f|^2)^(1/2) with
/// cell-intersection weights by 4^d subsampling; balls are clipped to the
/// domain and normalized by the intersected volume.
std::vector<double> average_Mt(const GridField& field, double t, const std::vector<Vec>& points);
double average_Mt_at(const GridField& field, double t, const Vec& point);

struct Region {
    double lo[2] = {0.0, 0.0};
    double hi[2] = {1.0, 1.0};
    static Region all(const GridField& f) {
        Region r;
        r.lo[0] = f.lo[0];
        r.lo[1] = f.lo[1];
        r.hi[0] = f.hi(0);
        r.hi[1] = f.dim == 2 ? f.hi(1) : 1.0;
        return r;
    }
};

/// Grid quadrature of (int_region |field|^p)^(1/p); p = infinity gives the
/// max of |field| over nodes in the region. Vector fields use the Euclidean
/// pointwise magnitude.
double lp_norm(const GridField& field, double p, const Region& region);
double lp_norm(const GridField& field, double p);

/// L2 norm over the boundary strip {x in domain : dist(x, boundary) < t}.
double layer_norm(const GridField& field, double t);

}  // namespace msh

#endif
