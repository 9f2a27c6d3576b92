#include "msh/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msh/errors.hpp"
#include "msh/quadrature.hpp"

namespace msh {

namespace {

double bump_raw(double r2) { return r2 < 0.25 ? std::exp(-1.0 / (1.0 - 4.0 * r2)) : 0.0; }

double bump_mass_unnormalized(int d) {
    if (d == 1)
        return integrate_adaptive([](double x) { return bump_raw(x * x); }, -0.5, 0.5, 1e-15);
    // radial in 2-D
    return 2.0 * kPi *
           integrate_adaptive([](double r) { return bump_raw(r * r) * r; }, 0.0, 0.5, 1e-15);
}

}  // namespace

Mollifier::Mollifier(int dim) : d(dim) { norm_const = 1.0 / bump_mass_unnormalized(dim); }

double Mollifier::mass_by_quadrature() const {
    return norm_const * bump_mass_unnormalized(d);
}

GridField smooth_partial(const TwoSlotKernel& g, double eps, const GridField& ctx) {
    if (!(eps > 0.0)) throw InvalidInput("smooth_partial: eps must be positive");
    if (ctx.h > eps / 8.0 + 1e-15)
        throw UnresolvedScale("smooth_partial: grid spacing does not resolve eps");

    Mollifier phi(ctx.dim);
    const int K = static_cast<int>(std::ceil(0.5 * eps / ctx.h));
    GridField out = GridField::scalar(ctx.dim, ctx.lo[0], ctx.lo[1], ctx.h, ctx.n[0], ctx.n[1]);

    if (ctx.dim == 1) {
        std::vector<double> w(2 * K + 1);
        for (int k = -K; k <= K; ++k) w[k + K] = phi.eval_r2((k * ctx.h / eps) * (k * ctx.h / eps));
        for (int i = 0; i < ctx.n[0]; ++i) {
            Vec x{ctx.x1(i)};
            Vec y{x[0] / eps};
            double acc = 0.0, mass = 0.0;
            for (int k = -K; k <= K; ++k) {
                int iz = i + k;
                if (iz < 0 || iz >= ctx.n[0]) continue;  // zero extension
                Vec z{ctx.x1(iz)};
                acc += w[k + K] * g(z, y);
                mass += w[k + K];
            }
            out.at(i) = mass > 0 ? acc / mass : 0.0;
        }
        return out;
    }

    for (int j = 0; j < ctx.n[1]; ++j)
        for (int i = 0; i < ctx.n[0]; ++i) {
            Vec x{ctx.x1(i), ctx.x2(j)};
            Vec y{x[0] / eps, x[1] / eps};
            double acc = 0.0, mass = 0.0;
            for (int kj = -K; kj <= K; ++kj) {
                int jz = j + kj;
                if (jz < 0 || jz >= ctx.n[1]) continue;
                for (int ki = -K; ki <= K; ++ki) {
                    int iz = i + ki;
                    if (iz < 0 || iz >= ctx.n[0]) continue;
                    double r2 = (ki * ki + kj * kj) * (ctx.h / eps) * (ctx.h / eps);
                    double wgt = phi.eval_r2(r2);
                    if (wgt == 0.0) continue;
                    Vec z{ctx.x1(iz), ctx.x2(jz)};
                    acc += wgt * g(z, y);
                    mass += wgt;
                }
            }
            out.at(i, j) = mass > 0 ? acc / mass : 0.0;
        }
    return out;
}

namespace {

double field_sq(const GridField& f, double x, double y) {
    double s = 0.0;
    for (int c = 0; c < f.comp; ++c) {
        double v = f.interpolate(x, y, c);
        s += v * v;
    }
    return s;
}

}  // namespace

double average_Mt_at(const GridField& f, double t, const Vec& point) {
    if (!(t > 0.0)) throw InvalidInput("average_Mt: t must be positive");
    const int sub = 4;  // 4^d subsamples per grid cell
    double lo0 = f.lo[0], hi0 = f.hi(0);
    double acc = 0.0, vol = 0.0;

    if (f.dim == 1) {
        double a = std::max(point[0] - t, lo0), b = std::min(point[0] + t, hi0);
        if (b <= a) return 0.0;
        int ia = std::max(0, static_cast<int>(std::floor((a - lo0) / f.h)));
        int ib = std::min(f.n[0] - 2, static_cast<int>(std::floor((b - lo0) / f.h)));
        for (int i = ia; i <= ib; ++i)
            for (int s = 0; s < sub; ++s) {
                double x = lo0 + (i + (s + 0.5) / sub) * f.h;
                if (std::abs(x - point[0]) > t || x < a || x > b) continue;
                acc += field_sq(f, x, 0.0) * (f.h / sub);
                vol += f.h / sub;
            }
        return vol > 0 ? std::sqrt(acc / vol) : 0.0;
    }

    double lo1 = f.lo[1], hi1 = f.hi(1);
    double a0 = std::max(point[0] - t, lo0), b0 = std::min(point[0] + t, hi0);
    double a1 = std::max(point[1] - t, lo1), b1 = std::min(point[1] + t, hi1);
    if (b0 <= a0 || b1 <= a1) return 0.0;
    int ia = std::max(0, static_cast<int>(std::floor((a0 - lo0) / f.h)));
    int ib = std::min(f.n[0] - 2, static_cast<int>(std::floor((b0 - lo0) / f.h)));
    int ja = std::max(0, static_cast<int>(std::floor((a1 - lo1) / f.h)));
    int jb = std::min(f.n[1] - 2, static_cast<int>(std::floor((b1 - lo1) / f.h)));
    double t2 = t * t;
    double subvol = (f.h / sub) * (f.h / sub);
    for (int j = ja; j <= jb; ++j)
        for (int i = ia; i <= ib; ++i)
            for (int sj = 0; sj < sub; ++sj)
                for (int si = 0; si < sub; ++si) {
                    double x = lo0 + (i + (si + 0.5) / sub) * f.h;
                    double y = lo1 + (j + (sj + 0.5) / sub) * f.h;
                    double dx = x - point[0], dy = y - point[1];
                    if (dx * dx + dy * dy > t2) continue;
                    if (x < lo0 || x > hi0 || y < lo1 || y > hi1) continue;
                    acc += field_sq(f, x, y) * subvol;
                    vol += subvol;
                }
    return vol > 0 ? std::sqrt(acc / vol) : 0.0;
}

std::vector<double> average_Mt(const GridField& field, double t, const std::vector<Vec>& points) {
    std::vector<double> out(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) out[k] = average_Mt_at(field, t, points[k]);
    return out;
}

double lp_norm(const GridField& f, double p) { return lp_norm(f, p, Region::all(f)); }

double lp_norm(const GridField& f, double p, const Region& region) {
    if (!(p >= 1.0)) throw InvalidInput("lp_norm: p must be at least 1");

    auto mag = [&](int i, int j) {
        double s = 0.0;
        for (int c = 0; c < f.comp; ++c) {
            double v = f.at(i, j, c);
            s += v * v;
        }
        return std::sqrt(s);
    };

    if (std::isinf(p)) {
        double m = 0.0;
        for (int j = 0; j < f.n[1]; ++j)
            for (int i = 0; i < f.n[0]; ++i) {
                double x = f.x1(i), y = f.dim == 2 ? f.x2(j) : 0.0;
                if (x < region.lo[0] - 1e-14 || x > region.hi[0] + 1e-14) continue;
                if (f.dim == 2 && (y < region.lo[1] - 1e-14 || y > region.hi[1] + 1e-14)) continue;
                m = std::max(m, mag(i, j));
            }
        return m;
    }

    // trapezoid-type weights: each node carries the overlap of its dual cell
    // with the region
    double acc = 0.0;
    for (int j = 0; j < f.n[1]; ++j)
        for (int i = 0; i < f.n[0]; ++i) {
            double x = f.x1(i);
            double wx = std::max(0.0, std::min(x + 0.5 * f.h, region.hi[0]) -
                                          std::max(x - 0.5 * f.h, region.lo[0]));
            double w = wx;
            if (f.dim == 2) {
                double y = f.x2(j);
                double wy = std::max(0.0, std::min(y + 0.5 * f.h, region.hi[1]) -
                                              std::max(y - 0.5 * f.h, region.lo[1]));
                w *= wy;
            }
            if (w <= 0.0) continue;
            acc += std::pow(mag(i, j), p) * w;
        }
    return std::pow(acc, 1.0 / p);
}

double layer_norm(const GridField& f, double t) {
    if (!(t > 0.0)) throw InvalidInput("layer_norm: t must be positive");
    const int sub = 4;
    double lo0 = f.lo[0], hi0 = f.hi(0);
    double acc = 0.0;
    if (f.dim == 1) {
        for (int i = 0; i + 1 < f.n[0]; ++i)
            for (int s = 0; s < sub; ++s) {
                double x = lo0 + (i + (s + 0.5) / sub) * f.h;
                double dist = std::min(x - lo0, hi0 - x);
                if (dist >= t) continue;
                acc += f.interpolate(x) * f.interpolate(x) * (f.h / sub);
            }
        return std::sqrt(acc);
    }
    double lo1 = f.lo[1], hi1 = f.hi(1);
    double subvol = (f.h / sub) * (f.h / sub);
    for (int j = 0; j + 1 < f.n[1]; ++j)
        for (int i = 0; i + 1 < f.n[0]; ++i)
            for (int sj = 0; sj < sub; ++sj)
                for (int si = 0; si < sub; ++si) {
                    double x = lo0 + (i + (si + 0.5) / sub) * f.h;
                    double y = lo1 + (j + (sj + 0.5) / sub) * f.h;
                    double dist = std::min({x - lo0, hi0 - x, y - lo1, hi1 - y});
                    if (dist >= t) continue;
                    double s = 0.0;
                    for (int c = 0; c < f.comp; ++c) {
                        double v = f.interpolate(x, y, c);
                        s += v * v;
                    }
                    acc += s * subvol;
                }
    return std::sqrt(acc);
}

}  // namespace msh
