#include "msh/elliptic.hpp"

#include <algorithm>
#include <memory>
#include <cmath>

#include "msh/fit.hpp"
#include "msh/operators.hpp"

namespace msh {

namespace {

double poincare_constant(int dim, const Rect& rect) {
    double lam = 0.0;
    for (int k = 0; k < dim; ++k) {
        double len = rect.hi[k] - rect.lo[k];
        lam += kPi * kPi / (len * len);
    }
    return 1.0 / std::sqrt(lam);
}

GridField solve_1d(const MatFn& A, const ScalarFn& F, const VectorFn& f, const ScalarFn& g,
                   const Rect& rect, double h, SolveStats* stats, double lambda) {
    const double len = rect.hi[0] - rect.lo[0];
    const int N = static_cast<int>(std::lround(len / h));
    if (N < 2 || std::abs(len / h - N) > 1e-8)
        throw InvalidInput("solve_dirichlet: h must divide the interval length");

    auto xat = [&](double s) { return rect.lo[0] + s * h; };
    std::vector<double> a(N), fx(N);  // face samples at (i+1/2)
    for (int i = 0; i < N; ++i) {
        Vec xm{xat(i + 0.5)};
        a[i] = A(xm)(0, 0);
        if (!(a[i] > 0.0)) throw NonElliptic("solve_dirichlet: nonpositive coefficient");
        fx[i] = f ? f(xm)[0] : 0.0;
    }

    // tridiagonal system for interior nodes, Thomas elimination
    std::vector<double> du(N + 1, 0.0);
    double g0 = g ? g(Vec{xat(0)}) : 0.0;
    double g1 = g ? g(Vec{xat(N)}) : 0.0;
    std::vector<double> rhs(N + 1, 0.0), cp(N + 1, 0.0);
    for (int i = 1; i < N; ++i)
        rhs[i] = (F ? F(Vec{xat(i)}) : 0.0) + (fx[i] - fx[i - 1]) / h;
    rhs[1] += a[0] / (h * h) * g0;
    rhs[N - 1] += a[N - 1] / (h * h) * g1;

    // diag b_i = (a_{i-1/2}+a_{i+1/2})/h^2, off-diagonals -a_{i+-1/2}/h^2
    double h2 = h * h;
    std::vector<double> bdiag(N + 1);
    for (int i = 1; i < N; ++i) bdiag[i] = (a[i - 1] + a[i]) / h2;
    cp[1] = -a[1] / h2 / bdiag[1];
    rhs[1] = rhs[1] / bdiag[1];
    for (int i = 2; i < N; ++i) {
        double low = -a[i - 1] / h2;
        double m = bdiag[i] - low * cp[i - 1];
        cp[i] = -a[i] / h2 / m;
        rhs[i] = (rhs[i] - low * rhs[i - 1]) / m;
    }
    du[N - 1] = rhs[N - 1];
    for (int i = N - 2; i >= 1; --i) du[i] = rhs[i] - cp[i] * du[i + 1];
    du[0] = g0;
    du[N] = g1;

    GridField u = GridField::scalar(1, rect.lo[0], 0.0, h, N + 1, 1);
    u.values = du;
    if (stats) {
        stats->iterations = 0;
        stats->residual = 0.0;
        GridField gu = gradient(u);
        stats->grad_l2 = lp_norm(gu, 2.0);
        double fn = 0.0, Fn = 0.0;
        for (int i = 0; i < N; ++i) fn += fx[i] * fx[i] * h;
        for (int i = 0; i <= N; ++i) {
            double v = F ? F(Vec{xat(i)}) : 0.0;
            Fn += v * v * (i == 0 || i == N ? 0.5 : 1.0) * h;
        }
        stats->energy_bound =
            (std::sqrt(fn) + poincare_constant(1, rect) * std::sqrt(Fn)) / lambda;
    }
    return u;
}

struct Faces2D {
    int n1, n2;  // node counts
    double h;
    std::vector<double> ax11, ax12;  // x-faces: (n1-1) x n2
    std::vector<double> ay21, ay22;  // y-faces: n1 x (n2-1)
    std::vector<double> fx, fy;
    bool has_cross = false;

    int xf(int i, int j) const { return j * (n1 - 1) + i; }
    int yf(int i, int j) const { return j * n1 + i; }
};

Faces2D sample_faces_2d(const MatFn& A, const VectorFn& f, const Rect& rect, double h, int n1,
                        int n2) {
    Faces2D fd;
    fd.n1 = n1;
    fd.n2 = n2;
    fd.h = h;
    fd.ax11.resize((n1 - 1) * n2);
    fd.ax12.resize((n1 - 1) * n2);
    fd.fx.assign((n1 - 1) * n2, 0.0);
    fd.ay21.resize(n1 * (n2 - 1));
    fd.ay22.resize(n1 * (n2 - 1));
    fd.fy.assign(n1 * (n2 - 1), 0.0);
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i + 1 < n1; ++i) {
            Vec xm{rect.lo[0] + (i + 0.5) * h, rect.lo[1] + j * h};
            Mat a = A(xm);
            fd.ax11[fd.xf(i, j)] = a(0, 0);
            fd.ax12[fd.xf(i, j)] = a(0, 1);
            if (std::abs(a(0, 1)) > 1e-14) fd.has_cross = true;
            if (!(a(0, 0) > 0.0)) throw NonElliptic("solve_dirichlet: nonpositive coefficient");
            if (f) fd.fx[fd.xf(i, j)] = f(xm)[0];
        }
    for (int j = 0; j + 1 < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            Vec ym{rect.lo[0] + i * h, rect.lo[1] + (j + 0.5) * h};
            Mat a = A(ym);
            fd.ay21[fd.yf(i, j)] = a(1, 0);
            fd.ay22[fd.yf(i, j)] = a(1, 1);
            if (std::abs(a(1, 0)) > 1e-14) fd.has_cross = true;
            if (!(a(1, 1) > 0.0)) throw NonElliptic("solve_dirichlet: nonpositive coefficient");
            if (f) fd.fy[fd.yf(i, j)] = f(ym)[1];
        }
    return fd;
}

// -div(A grad u) at interior nodes; boundary rows are identities (kept zero
// in Krylov vectors).
void apply_dirichlet(const Faces2D& fd, const std::vector<double>& u, std::vector<double>& out) {
    const int n1 = fd.n1, n2 = fd.n2;
    const double h = fd.h;
    auto id = [n1](int i, int j) { return j * n1 + i; };
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 1; j + 1 < n2; ++j)
        for (int i = 1; i + 1 < n1; ++i) {
            auto flux_x = [&](int fi) {  // face between (fi,j) and (fi+1,j)
                double dx = (u[id(fi + 1, j)] - u[id(fi, j)]) / h;
                double dy = (u[id(fi, j + 1)] + u[id(fi + 1, j + 1)] - u[id(fi, j - 1)] -
                             u[id(fi + 1, j - 1)]) /
                            (4.0 * h);
                return fd.ax11[fd.xf(fi, j)] * dx + fd.ax12[fd.xf(fi, j)] * dy;
            };
            auto flux_y = [&](int fj) {
                double dy = (u[id(i, fj + 1)] - u[id(i, fj)]) / h;
                double dx = (u[id(i + 1, fj)] + u[id(i + 1, fj + 1)] - u[id(i - 1, fj)] -
                             u[id(i - 1, fj + 1)]) /
                            (4.0 * h);
                return fd.ay22[fd.yf(i, fj)] * dy + fd.ay21[fd.yf(i, fj)] * dx;
            };
            out[id(i, j)] =
                -(flux_x(i) - flux_x(i - 1)) / h - (flux_y(j) - flux_y(j - 1)) / h;
        }
}

GridField solve_2d(const MatFn& A, const ScalarFn& F, const VectorFn& f, const ScalarFn& g,
                   const Rect& rect, double h, const SolveOptions& opt, SolveStats* stats,
                   double lambda) {
    const double len1 = rect.hi[0] - rect.lo[0];
    const double len2 = rect.hi[1] - rect.lo[1];
    const int N1 = static_cast<int>(std::lround(len1 / h));
    const int N2 = static_cast<int>(std::lround(len2 / h));
    if (N1 < 2 || N2 < 2 || std::abs(len1 / h - N1) > 1e-8 || std::abs(len2 / h - N2) > 1e-8)
        throw InvalidInput("solve_dirichlet: h must divide both side lengths");
    const int n1 = N1 + 1, n2 = N2 + 1;
    const std::size_t M = static_cast<std::size_t>(n1) * n2;

    Faces2D fd = sample_faces_2d(A, f, rect, h, n1, n2);
    auto id = [n1](int i, int j) { return j * n1 + i; };

    // boundary lift
    std::vector<double> ubc(M, 0.0);
    if (g)
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i)
                if (i == 0 || i == n1 - 1 || j == 0 || j == n2 - 1)
                    ubc[id(i, j)] = g(Vec{rect.lo[0] + i * h, rect.lo[1] + j * h});

    std::vector<double> b(M, 0.0), tmp(M, 0.0);
    apply_dirichlet(fd, ubc, tmp);
    for (int j = 1; j + 1 < n2; ++j)
        for (int i = 1; i + 1 < n1; ++i) {
            Vec x{rect.lo[0] + i * h, rect.lo[1] + j * h};
            double divf = (fd.fx[fd.xf(i, j)] - fd.fx[fd.xf(i - 1, j)]) / h +
                          (fd.fy[fd.yf(i, j)] - fd.fy[fd.yf(i, j - 1)]) / h;
            b[id(i, j)] = (F ? F(x) : 0.0) + divf - tmp[id(i, j)];
        }

    std::vector<double> diag(M, 1.0);
    for (int j = 1; j + 1 < n2; ++j)
        for (int i = 1; i + 1 < n1; ++i)
            diag[id(i, j)] = (fd.ax11[fd.xf(i - 1, j)] + fd.ax11[fd.xf(i, j)] +
                              fd.ay22[fd.yf(i, j - 1)] + fd.ay22[fd.yf(i, j)]) /
                             (h * h);

    LinOp op = [&fd](const std::vector<double>& u, std::vector<double>& out) {
        apply_dirichlet(fd, u, out);
    };
    KrylovOptions kopt;
    kopt.tol = opt.tol;
    kopt.max_iter = opt.max_iter;
    std::vector<double> x(M, 0.0);
    KrylovResult kr = fd.has_cross ? bicgstab(op, diag, b, x, kopt) : pcg(op, diag, b, x, kopt);

    GridField u = GridField::scalar(2, rect.lo[0], rect.lo[1], h, n1, n2);
    for (std::size_t k = 0; k < M; ++k) u.values[k] = x[k] + ubc[k];
    if (stats) {
        stats->iterations = kr.iterations;
        stats->residual = kr.relative_residual;
        GridField gu = gradient(u);
        stats->grad_l2 = lp_norm(gu, 2.0);
        double fn = 0.0, Fn = 0.0;
        for (double v : fd.fx) fn += v * v * h * h;
        for (double v : fd.fy) fn += v * v * h * h;
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i) {
                double v = F ? F(Vec{rect.lo[0] + i * h, rect.lo[1] + j * h}) : 0.0;
                Fn += v * v * h * h;
            }
        stats->energy_bound =
            (std::sqrt(fn) + poincare_constant(2, rect) * std::sqrt(Fn)) / lambda;
    }
    return u;
}

}  // namespace

GridField solve_dirichlet_raw(int dim, const MatFn& A, const ScalarFn& F, const VectorFn& f,
                              const ScalarFn& g, const Rect& rect, double h,
                              const SolveOptions& opt, SolveStats* stats, double lambda) {
    if (dim == 1) return solve_1d(A, F, f, g, rect, h, stats, lambda);
    if (dim == 2) return solve_2d(A, F, f, g, rect, h, opt, stats, lambda);
    throw InvalidInput("solve_dirichlet: dimension must be 1 or 2");
}

GridField solve_dirichlet(const MultiscaleCoefficient& coef, const ScalarFn& F, const VectorFn& f,
                          double h, const SolveOptions& opt, SolveStats* stats,
                          const ScalarFn& g) {
    double eps_n = coef.scales.back();
    if (!opt.allow_unresolved && h > eps_n / 8.0 + 1e-15)
        throw UnresolvedScale("solve_dirichlet: h = " + format_double(h) +
                              " does not resolve eps_n = " + format_double(eps_n) +
                              " (need h <= eps_n/8, or set the override flag)");
    Rect rect;  // unit domain
    MatFn A = [&coef](const Vec& x) { return coef.eval(x); };
    return solve_dirichlet_raw(coef.dim, A, F, f, g, rect, h, opt, stats, coef.lambda);
}

ScalarFn field_as_scalar(const GridField& f) {
    auto copy = std::make_shared<GridField>(f);
    return [copy](const Vec& x) { return copy->interpolate(x[0], copy->dim == 2 ? x[1] : 0.0); };
}

VectorFn field_as_vector(const GridField& f) {
    auto copy = std::make_shared<GridField>(f);
    return [copy](const Vec& x) {
        Vec v(copy->dim);
        double y = copy->dim == 2 ? x[1] : 0.0;
        for (int c = 0; c < copy->comp; ++c) v[c] = copy->interpolate(x[0], y, c);
        return v;
    };
}

GridField gradient(const GridField& u) {
    if (u.comp != 1) throw InvalidInput("gradient expects a scalar field");
    GridField g = GridField::vector(u.dim, u.lo[0], u.lo[1], u.h, u.n[0], u.n[1]);
    const double h = u.h;
    for (int j = 0; j < u.n[1]; ++j)
        for (int i = 0; i < u.n[0]; ++i) {
            double dx;
            if (i == 0)
                dx = (u.at(1, j) - u.at(0, j)) / h;
            else if (i == u.n[0] - 1)
                dx = (u.at(i, j) - u.at(i - 1, j)) / h;
            else
                dx = (u.at(i + 1, j) - u.at(i - 1, j)) / (2 * h);
            g.at(i, j, 0) = dx;
            if (u.dim == 2) {
                double dy;
                if (j == 0)
                    dy = (u.at(i, 1) - u.at(i, 0)) / h;
                else if (j == u.n[1] - 1)
                    dy = (u.at(i, j) - u.at(i, j - 1)) / h;
                else
                    dy = (u.at(i, j + 1) - u.at(i, j - 1)) / (2 * h);
                g.at(i, j, 1) = dy;
            }
        }
    return g;
}

RefineResult refine_study(const std::function<GridField(double)>& solve,
                          const std::vector<double>& h_list) {
    if (h_list.size() < 3) throw InvalidInput("refine_study needs at least 3 grid levels");
    RefineResult out;
    out.h = h_list;
    std::vector<GridField> sols;
    sols.reserve(h_list.size());
    for (double h : h_list) sols.push_back(solve(h));

    for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
        const GridField& coarse = sols[k];
        const GridField& fine = sols[k + 1];
        double acc = 0.0;
        for (int j = 0; j < coarse.n[1]; ++j)
            for (int i = 0; i < coarse.n[0]; ++i) {
                double x = coarse.x1(i), y = coarse.dim == 2 ? coarse.x2(j) : 0.0;
                double d = coarse.at(i, j) - fine.interpolate(x, y);
                double w = (i == 0 || i == coarse.n[0] - 1 ? 0.5 : 1.0);
                if (coarse.dim == 2) w *= (j == 0 || j == coarse.n[1] - 1 ? 0.5 : 1.0);
                acc += d * d * w * std::pow(coarse.h, coarse.dim);
            }
        out.diff.push_back(std::sqrt(acc));
    }

    bool positive = true;
    for (double d : out.diff) positive = positive && d > 1e-15;
    if (!positive) {
        out.order_claimed = false;  // differences at noise level, no claim
        return out;
    }
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t k = 0; k < out.diff.size(); ++k) pairs.push_back({h_list[k], out.diff[k]});
    FitResult fit = fit_rate(pairs);
    out.order = fit.slope;
    out.r2 = fit.r2;
    out.order_claimed = fit.r2 >= 0.98;
    return out;
}

}  // namespace msh
