#ifndef MSH_GRID_HPP
#define MSH_GRID_HPP

#include <string>
#include <vector>

#include "msh/common.hpp"
#include "msh/errors.hpp"

namespace msh {

/// Nodal field on a uniform grid over an axis-aligned rectangle
/// [lo1,hi1] x [lo2,hi2] (d=2) or interval [lo1,hi1] (d=1). Nodes sit at
/// lo + i*h, i = 0..n-1 per axis, with h identical along both axes.
/// Vector fields store components interleaved: values[node*comp + c].
struct GridField {
    int dim = 1;
    int comp = 1;  // 1 = scalar, dim = vector
    double lo[2] = {0.0, 0.0};
    double h = 0.0;
    int n[2] = {0, 1};  // node counts per axis (n[1] == 1 when dim == 1)
    std::vector<double> values;

    static GridField scalar(int dim, double lo1, double lo2, double h, int n1, int n2);
    static GridField vector(int dim, double lo1, double lo2, double h, int n1, int n2);

    int node_count() const { return n[0] * n[1]; }
    int idx(int i, int j = 0) const { return j * n[0] + i; }
    double x1(int i) const { return lo[0] + i * h; }
    double x2(int j) const { return lo[1] + j * h; }
    double hi(int axis) const { return lo[axis] + (n[axis] - 1) * h; }

    double& at(int i, int j = 0, int c = 0) { return values[(j * n[0] + i) * comp + c]; }
    double at(int i, int j = 0, int c = 0) const { return values[(j * n[0] + i) * comp + c]; }

    bool on_boundary(int i, int j) const {
        return i == 0 || i == n[0] - 1 || (dim == 2 && (j == 0 || j == n[1] - 1));
    }

    /// Bilinear (linear in 1-D) point evaluation; clamps to the rectangle.
    double interpolate(double x, double y = 0.0, int c = 0) const;
};

/// Binary grid container shared by the field and corrector outputs.
/// Layout (little-endian): magic "MSGRID01", i32 dim, i32 n_scales, i32 comp,
/// i32 n1, i32 n2, f64 lo1, f64 lo2, f64 h, i32 n_slow, f64 slow coords
/// (n_slow * dim entries, row-major), f64 payload.
void write_grid(const std::string& path, const GridField& f,
                const std::vector<double>& slow_coords = {}, int n_scales = 0);
GridField read_grid(const std::string& path, std::vector<double>* slow_coords = nullptr,
                    int* n_scales = nullptr);

}  // namespace msh

#endif
