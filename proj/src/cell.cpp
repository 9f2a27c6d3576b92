#include "msh/cell.hpp"

#include <algorithm>
#include <cmath>

#include "msh/parallel.hpp"
#include "msh/quadrature.hpp"

namespace msh {

std::pair<CorrectorField, EffectiveMatrix> solve_cell_1d(const Scalar1D& a, int n_grid,
                                                         double quad_tol) {
    // ellipticity guard before trusting the quadrature; also detects the
    // constant case, where the harmonic mean is the value itself and the
    // corrector vanishes identically
    double amin = a(0.0), amax = amin;
    for (int k = 0; k < 4096; ++k) {
        double v = a(k / 4096.0);
        if (!(v > 0.0))
            throw NonElliptic("solve_cell_1d: coefficient is not positive on [0,1)");
        amin = std::min(amin, v);
        amax = std::max(amax, v);
    }
    double a_hat;
    if (amin == amax) {
        a_hat = amin;
    } else {
        // panelize below the finest oscillation the caller's grid resolves
        int panels = std::max(64, n_grid / 4);
        double inv_mean = integrate_adaptive_panels([&](double y) { return 1.0 / a(y); }, 0.0,
                                                    1.0, quad_tol, panels);
        a_hat = 1.0 / inv_mean;
    }

    CorrectorField cf;
    cf.d = 1;
    cf.ncell = n_grid;
    cf.h = 1.0 / n_grid;
    cf.values.assign(1, std::vector<double>(n_grid, 0.0));
    cf.gradient.assign(1, std::vector<double>(n_grid, 0.0));

    auto chi_prime = [&](double y) { return a_hat / a(y) - 1.0; };
    // cumulative integral of chi' with per-cell Simpson panels
    double acc = 0.0;
    for (int i = 0; i < n_grid; ++i) {
        double y = i * cf.h;
        cf.values[0][i] = acc;
        cf.gradient[0][i] = chi_prime(y);
        double ym = y + 0.5 * cf.h, yr = y + cf.h;
        acc += cf.h / 6.0 * (chi_prime(y) + 4.0 * chi_prime(ym) + chi_prime(yr));
    }
    // mean-zero shift; the rectangle mean is spectrally accurate on the torus
    double mean = 0.0;
    for (double v : cf.values[0]) mean += v;
    mean /= n_grid;
    for (double& v : cf.values[0]) v -= mean;
    double residual = 0.0, energy2 = 0.0;
    for (int i = 0; i < n_grid; ++i) {
        residual += cf.values[0][i];
        energy2 += cf.gradient[0][i] * cf.gradient[0][i];
    }
    cf.mean_residual.push_back(std::abs(residual / n_grid));
    cf.energy.push_back(std::sqrt(energy2 / n_grid));

    EffectiveMatrix em;
    em.value = Mat::identity(1, a_hat);
    em.h = cf.h;
    em.solver_tol = quad_tol;
    return {std::move(cf), em};
}

namespace {

struct FaceData {
    int N;
    double h;
    // x-faces at ((i+1/2)h, jh): between nodes (i,j) and (i+1,j)
    std::vector<double> ax11, ax12;
    // y-faces at (ih, (j+1/2)h): between nodes (i,j) and (i,j+1)
    std::vector<double> ay21, ay22;
    bool has_cross = false;

    int id(int i, int j) const { return ((j + N) % N) * N + ((i + N) % N); }
};

FaceData sample_faces(const MatField2D& A, int N) {
    FaceData fd;
    fd.N = N;
    fd.h = 1.0 / N;
    fd.ax11.resize(N * N);
    fd.ax12.resize(N * N);
    fd.ay21.resize(N * N);
    fd.ay22.resize(N * N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            Mat ax = A((i + 0.5) * fd.h, j * fd.h);
            Mat ay = A(i * fd.h, (j + 0.5) * fd.h);
            int k = j * N + i;
            fd.ax11[k] = ax(0, 0);
            fd.ax12[k] = ax(0, 1);
            fd.ay21[k] = ay(1, 0);
            fd.ay22[k] = ay(1, 1);
            if (!(ax(0, 0) > 0.0) || !(ay(1, 1) > 0.0))
                throw NonElliptic("solve_cell_2d: nonpositive diagonal coefficient at a face");
            if (std::abs(ax(0, 1)) > 1e-14 || std::abs(ay(1, 0)) > 1e-14) fd.has_cross = true;
        }
    return fd;
}

// -div(A grad u) with periodic wrap; cross terms use averaged tangential
// differences at the faces.
void apply_periodic(const FaceData& fd, const std::vector<double>& u, std::vector<double>& out) {
    const int N = fd.N;
    const double h = fd.h;
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            auto fx = [&](int ii, int jj) {
                int k = fd.id(ii, jj);
                double dx = (u[fd.id(ii + 1, jj)] - u[fd.id(ii, jj)]) / h;
                double dy = (u[fd.id(ii, jj + 1)] + u[fd.id(ii + 1, jj + 1)] -
                             u[fd.id(ii, jj - 1)] - u[fd.id(ii + 1, jj - 1)]) /
                            (4.0 * h);
                return fd.ax11[k] * dx + fd.ax12[k] * dy;
            };
            auto fy = [&](int ii, int jj) {
                int k = fd.id(ii, jj);
                double dy = (u[fd.id(ii, jj + 1)] - u[fd.id(ii, jj)]) / h;
                double dx = (u[fd.id(ii + 1, jj)] + u[fd.id(ii + 1, jj + 1)] -
                             u[fd.id(ii - 1, jj)] - u[fd.id(ii - 1, jj + 1)]) /
                            (4.0 * h);
                return fd.ay22[k] * dy + fd.ay21[k] * dx;
            };
            out[fd.id(i, j)] =
                -(fx(i, j) - fx(i - 1, j)) / h - (fy(i, j) - fy(i, j - 1)) / h;
        }
    }
}

}  // namespace

std::pair<CorrectorField, EffectiveMatrix> solve_cell_2d(const MatField2D& A, double h,
                                                         const KrylovOptions& opt) {
    const double invh = 1.0 / h;
    const int N = static_cast<int>(std::lround(invh));
    if (N < 2 || std::abs(invh - N) > 1e-9 * invh)
        throw InvalidInput("solve_cell_2d: h must divide 1");

    FaceData fd = sample_faces(A, N);
    const std::size_t M = static_cast<std::size_t>(N) * N;

    std::vector<double> diag(M);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i)
            diag[fd.id(i, j)] = (fd.ax11[fd.id(i, j)] + fd.ax11[fd.id(i - 1, j)] +
                                 fd.ay22[fd.id(i, j)] + fd.ay22[fd.id(i, j - 1)]) /
                                (h * h);

    LinOp op = [&fd](const std::vector<double>& u, std::vector<double>& out) {
        apply_periodic(fd, u, out);
    };
    KrylovOptions kopt = opt;
    kopt.project_mean = true;

    CorrectorField cf;
    cf.d = 2;
    cf.ncell = N;
    cf.h = h;
    cf.values.assign(2, std::vector<double>(M, 0.0));
    cf.gradient.assign(2, std::vector<double>(2 * M, 0.0));

    EffectiveMatrix em;
    em.value = Mat(2);
    em.h = h;
    em.solver_tol = kopt.tol;

    for (int col = 0; col < 2; ++col) {
        // RHS: div(A e_col) from face samples; compatible (sums to zero) by
        // periodic telescoping.
        std::vector<double> b(M);
        const std::vector<double>& a1c = col == 0 ? fd.ax11 : fd.ax12;
        const std::vector<double>& a2c = col == 0 ? fd.ay21 : fd.ay22;
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i)
                b[fd.id(i, j)] = (a1c[fd.id(i, j)] - a1c[fd.id(i - 1, j)]) / h +
                                 (a2c[fd.id(i, j)] - a2c[fd.id(i, j - 1)]) / h;

        std::vector<double> chi(M, 0.0);
        KrylovResult kr;
        if (fd.has_cross)
            kr = bicgstab(op, diag, b, chi, kopt);
        else
            kr = pcg(op, diag, b, chi, kopt);
        em.iterations = std::max(em.iterations, kr.iterations);

        // mean-zero projection
        double mean = 0.0;
        for (double v : chi) mean += v;
        mean /= static_cast<double>(M);
        for (double& v : chi) v -= mean;

        double residual = 0.0;
        for (double v : chi) residual += v;
        cf.mean_residual.push_back(std::abs(residual / static_cast<double>(M)));

        // nodal central gradients, face-based energy
        double energy2 = 0.0;
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                std::size_t k = fd.id(i, j);
                cf.gradient[col][2 * k] = (chi[fd.id(i + 1, j)] - chi[fd.id(i - 1, j)]) / (2 * h);
                cf.gradient[col][2 * k + 1] =
                    (chi[fd.id(i, j + 1)] - chi[fd.id(i, j - 1)]) / (2 * h);
                double dx = (chi[fd.id(i + 1, j)] - chi[k]) / h;
                double dy = (chi[fd.id(i, j + 1)] - chi[k]) / h;
                energy2 += dx * dx + dy * dy;
            }
        cf.energy.push_back(std::sqrt(energy2 / static_cast<double>(M)));

        // effective column by midpoint quadrature over the faces
        double a_row0 = 0.0, a_row1 = 0.0;
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                std::size_t k = fd.id(i, j);
                double dx = (chi[fd.id(i + 1, j)] - chi[k]) / h;
                double dyx = (chi[fd.id(i, j + 1)] + chi[fd.id(i + 1, j + 1)] -
                              chi[fd.id(i, j - 1)] - chi[fd.id(i + 1, j - 1)]) /
                             (4.0 * h);
                a_row0 += fd.ax11[k] * (dx + (col == 0 ? 1.0 : 0.0)) +
                          fd.ax12[k] * (dyx + (col == 1 ? 1.0 : 0.0));
                double dy = (chi[fd.id(i, j + 1)] - chi[k]) / h;
                double dxy = (chi[fd.id(i + 1, j)] + chi[fd.id(i + 1, j + 1)] -
                              chi[fd.id(i - 1, j)] - chi[fd.id(i - 1, j + 1)]) /
                             (4.0 * h);
                a_row1 += fd.ay21[k] * (dxy + (col == 0 ? 1.0 : 0.0)) +
                          fd.ay22[k] * (dy + (col == 1 ? 1.0 : 0.0));
            }
        em.value(0, col) = a_row0 / static_cast<double>(M);
        em.value(1, col) = a_row1 / static_cast<double>(M);
        cf.values[col] = std::move(chi);
    }
    return {std::move(cf), em};
}

ReiteratedTable reiterated_effective(const MultiscaleCoefficient& coef,
                                     const std::vector<std::vector<Vec>>& slow_points, double h,
                                     int threads, bool keep_correctors) {
    const int n = coef.n_scales();
    if (n < 1) throw InvalidInput("reiterated_effective: coefficient has no scales");
    const int d = coef.dim;
    if (coef.cell_dim != d)
        throw DimensionMismatch("reiterated_effective needs cell_dim == dim");

    ReiteratedTable table;
    table.d = d;
    table.n = n;
    table.slow_points = slow_points;
    table.effective.resize(slow_points.size());
    table.correctors.resize(slow_points.size());

    parallel_for(slow_points.size(), threads, [&](std::size_t k) {
        const auto& slow = slow_points[k];
        if (static_cast<int>(slow.size()) != n - 1)
            throw DimensionMismatch("slow point arity must be n-1");
        std::array<Vec, kMaxArgs> args;
        for (int i = 0; i < n - 1; ++i) args[i] = slow[i];

        if (d == 1) {
            auto a = [&](double y) {
                auto local = args;
                Vec fy(1);
                fy[0] = y;
                local[n - 1] = fy;
                return coef.kernel(std::span<const Vec>(local.data(), n))(0, 0);
            };
            int n_grid = std::max(64, static_cast<int>(std::lround(1.0 / h)));
            auto [cf, em] = solve_cell_1d(a, n_grid);
            table.effective[k] = em;
            if (keep_correctors) table.correctors[k] = std::move(cf);
        } else {
            auto A = [&](double y1, double y2) {
                auto local = args;
                Vec fy(2);
                fy[0] = y1;
                fy[1] = y2;
                local[n - 1] = fy;
                return coef.kernel(std::span<const Vec>(local.data(), n));
            };
            auto [cf, em] = solve_cell_2d(A, h);
            table.effective[k] = em;
            if (keep_correctors) table.correctors[k] = std::move(cf);
        }
    });
    return table;
}

}  // namespace msh
