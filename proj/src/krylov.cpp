#include "msh/krylov.hpp"

#include <cmath>
#include <numeric>

namespace msh {

namespace {

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
double vnorm(const std::vector<double>& a) { return std::sqrt(vdot(a, a)); }

void remove_mean(std::vector<double>& v) {
    double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

void apply_jacobi(const std::vector<double>& diag, const std::vector<double>& r,
                  std::vector<double>& z) {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = diag[i] > 0.0 ? r[i] / diag[i] : r[i];
}

}  // namespace

KrylovResult pcg(const LinOp& apply, const std::vector<double>& diag, const std::vector<double>& b,
                 std::vector<double>& x, const KrylovOptions& opt) {
    const std::size_t n = b.size();
    if (x.size() != n) x.assign(n, 0.0);
    std::vector<double> r(n), z(n), p(n), ap(n);

    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    if (opt.project_mean) remove_mean(r);
    double bnorm = vnorm(b);
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        return {0, 0.0};
    }

    apply_jacobi(diag, r, z);
    if (opt.project_mean) remove_mean(z);
    p = z;
    double rz = vdot(r, z);
    for (int it = 1; it <= opt.max_iter; ++it) {
        apply(p, ap);
        double pap = vdot(p, ap);
        if (pap == 0.0) throw NoConvergence("pcg: breakdown (p.Ap = 0)");
        double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double res = vnorm(r) / bnorm;
        if (res <= opt.tol) {
            if (opt.project_mean) remove_mean(x);
            return {it, res};
        }
        apply_jacobi(diag, r, z);
        if (opt.project_mean) remove_mean(z);
        double rz_new = vdot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw NoConvergence("pcg: iteration cap reached");
}

KrylovResult bicgstab(const LinOp& apply, const std::vector<double>& diag,
                      const std::vector<double>& b, std::vector<double>& x,
                      const KrylovOptions& opt) {
    const std::size_t n = b.size();
    if (x.size() != n) x.assign(n, 0.0);
    std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);

    apply(x, v);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - v[i];
    if (opt.project_mean) remove_mean(r);
    std::fill(v.begin(), v.end(), 0.0);
    rhat = r;
    double bnorm = vnorm(b);
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        return {0, 0.0};
    }

    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        double rho1 = vdot(rhat, r);
        if (std::abs(rho1) < 1e-300) throw NoConvergence("bicgstab: rho breakdown");
        double beta = (rho1 / rho) * (alpha / omega);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        apply_jacobi(diag, p, phat);
        if (opt.project_mean) remove_mean(phat);
        apply(phat, v);
        alpha = rho1 / vdot(rhat, v);
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (vnorm(s) / bnorm <= opt.tol) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
            if (opt.project_mean) remove_mean(x);
            return {it, vnorm(s) / bnorm};
        }
        apply_jacobi(diag, s, shat);
        if (opt.project_mean) remove_mean(shat);
        apply(shat, t);
        double tt = vdot(t, t);
        if (tt == 0.0) throw NoConvergence("bicgstab: t breakdown");
        omega = vdot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        double res = vnorm(r) / bnorm;
        if (res <= opt.tol) {
            if (opt.project_mean) remove_mean(x);
            return {it, res};
        }
        rho = rho1;
        if (omega == 0.0) throw NoConvergence("bicgstab: omega breakdown");
    }
    throw NoConvergence("bicgstab: iteration cap reached");
}

}  // namespace msh
