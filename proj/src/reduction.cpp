#include "msh/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "msh/operators.hpp"
#include "msh/parallel.hpp"
#include "msh/quadrature.hpp"

namespace msh {

// ---------------------------------------------------------------------------
// SharpTable

// Trigonometric interpolation through m uniform samples: exact for
// bandlimited data, spectrally accurate for smooth periodic samples. The
// coefficient pass is O(m^2) once; evaluation is O(m).
std::vector<double> SharpTable::build_series(const double* samples, int m) {
    std::vector<double> coef(m + 2, 0.0);  // [c_0, s_0, c_1, s_1, ...]
    for (int k = 0; k <= m / 2; ++k) {
        double ck = 0.0, sk = 0.0;
        for (int j = 0; j < m; ++j) {
            double ang = 2.0 * kPi * k * j / m;
            ck += samples[j] * std::cos(ang);
            sk += samples[j] * std::sin(ang);
        }
        double w = (k == 0 || 2 * k == m) ? 1.0 : 2.0;
        coef[2 * k] = w * ck / m;
        coef[2 * k + 1] = w * sk / m;
    }
    return coef;
}

double SharpTable::eval_series(const std::vector<double>& coef, int m, double t) {
    double out = coef[0];
    for (int k = 1; k <= m / 2; ++k)
        out += coef[2 * k] * std::cos(2.0 * kPi * k * t) +
               coef[2 * k + 1] * std::sin(2.0 * kPi * k * t);
    return out;
}

double SharpTable::eval_trig_1d(const double* samples, double t) const {
    return eval_series(build_series(samples, m_), m_, t);
}

SharpTable SharpTable::build(const MultiscaleCoefficient& coef, double Q, int slow_m, int threads,
                             int fast_factor) {
    if (coef.dim != 1)
        throw InvalidInput("one-scale reduction is implemented for interval problems (d=1)");
    SharpTable t;
    t.rep_ = reperiodize(coef, Q);
    t.m_ = slow_m;
    const int n_sharp = t.rep_.sharp.n_scales();
    t.slow_dims_ = n_sharp - 1;
    if (t.slow_dims_ > 2)
        throw InvalidInput("slow lattice supports at most two slow scales at desk scale");

    const int lattice = t.slow_dims_ == 0 ? 1 : (t.slow_dims_ == 1 ? slow_m : slow_m * slow_m);
    std::vector<std::vector<Vec>> slow_points(lattice);
    for (int k = 0; k < lattice; ++k) {
        std::vector<Vec> pt;
        if (t.slow_dims_ >= 1) pt.push_back(Vec{static_cast<double>(k % slow_m) / slow_m});
        if (t.slow_dims_ == 2) pt.push_back(Vec{static_cast<double>(k / slow_m) / slow_m});
        slow_points[k] = std::move(pt);
    }

    // fast grid dense enough for the compressed periods of the sharp kernel
    int n_fast = std::max(256, fast_factor * static_cast<int>(t.rep_.approx.q));
    ReiteratedTable rt = reiterated_effective(t.rep_.sharp, slow_points, 1.0 / n_fast, threads);
    t.a_hat_.resize(lattice);
    for (int k = 0; k < lattice; ++k) t.a_hat_[k] = rt.effective[k].value(0, 0);
    t.correctors_ = std::move(rt.correctors);

    if (t.slow_dims_ == 1) {
        t.series_ = build_series(t.a_hat_.data(), slow_m);
    } else if (t.slow_dims_ == 2) {
        t.rows_.resize(slow_m);
        std::vector<double> row(slow_m);
        for (int j1 = 0; j1 < slow_m; ++j1) {
            for (int j2 = 0; j2 < slow_m; ++j2) row[j2] = t.a_hat_[j2 * slow_m + j1];
            t.rows_[j1] = build_series(row.data(), slow_m);
        }
    }
    return t;
}

double SharpTable::a_hat_at(const double* slow_fracs) const {
    if (slow_dims_ == 0) return a_hat_[0];
    if (slow_dims_ == 1) return eval_series(series_, m_, slow_fracs[0]);
    // separable evaluation: interpolate each row along dim 2, then the
    // resulting samples along dim 1
    std::vector<double> col(m_);
    for (int j1 = 0; j1 < m_; ++j1) col[j1] = eval_series(rows_[j1], m_, slow_fracs[1]);
    return eval_trig_1d(col.data(), slow_fracs[0]);
}

double SharpTable::a_flat_x(double x) const {
    double fr[2] = {0.0, 0.0};
    for (int i = 0; i < slow_dims_; ++i) fr[i] = frac(x / rep_.new_scales[i]);
    return a_hat_at(fr);
}

double SharpTable::grad_chi(double z, double x) const {
    const int n_sharp = rep_.sharp.n_scales();
    std::array<Vec, kMaxArgs> args;
    double fr[2] = {0.0, 0.0};
    for (int i = 0; i < slow_dims_; ++i) {
        fr[i] = frac(z / rep_.new_scales[i]);
        args[i] = Vec{fr[i]};
    }
    args[n_sharp - 1] = Vec{frac(x / rep_.new_scales.back())};
    double a_sharp = rep_.sharp.kernel(std::span<const Vec>(args.data(), n_sharp))(0, 0);
    return a_hat_at(fr) / a_sharp - 1.0;
}

// ---------------------------------------------------------------------------
// corrector term

GridField corrector_term_U(const SharpTable& table, const GridField& u_flat,
                           const std::vector<double>& new_scales, int threads) {
    if (u_flat.dim != 1) throw InvalidInput("corrector_term_U: interval fields only");
    const double eps_fine = new_scales.back();
    const double h = u_flat.h;
    if (h > eps_fine / 8.0 + 1e-15)
        throw UnresolvedScale("corrector_term_U: grid does not resolve eps_n'");

    GridField grad_flat = gradient(u_flat);
    const int nn = u_flat.n[0];

    // mollifier stencil, normalized discrete mass
    Mollifier phi(1);
    const int K = static_cast<int>(std::ceil(0.5 * eps_fine / h));
    std::vector<double> w(2 * K + 1, 0.0);
    double mass = 0.0;
    for (int k = -K; k <= K; ++k) {
        double v = phi.eval_r2((k * h / eps_fine) * (k * h / eps_fine));
        w[k + K] = v;
        mass += v;
    }
    for (double& v : w) v /= mass;

    // cache the homogenized value at every z node (slow slot)
    const int sd = table.slow_dims();
    std::vector<double> ahat_z(nn), chi_slow_fr(static_cast<std::size_t>(nn) * std::max(sd, 1));
    for (int iz = 0; iz < nn; ++iz) {
        double z = u_flat.x1(iz);
        double fr[2] = {0.0, 0.0};
        for (int i = 0; i < sd; ++i) {
            fr[i] = frac(z / new_scales[i]);
            chi_slow_fr[iz * std::max(sd, 1) + i] = fr[i];
        }
        ahat_z[iz] = table.a_hat_at(fr);
    }

    const auto& sharp = table.rep().sharp;
    const int n_sharp = sharp.n_scales();

    GridField out = GridField::vector(1, u_flat.lo[0], 0.0, h, nn, 1);
    parallel_for(nn, threads, [&](std::size_t ixs) {
        int ix = static_cast<int>(ixs);
        double x = u_flat.x1(ix);
        Vec fast{frac(x / eps_fine)};
        double acc = 0.0;
        for (int k = -K; k <= K; ++k) {
            int iz = ix + k;
            if (iz < 0 || iz >= nn) continue;  // grad u_flat extended by zero
            std::array<Vec, kMaxArgs> args;
            for (int i = 0; i < sd; ++i) args[i] = Vec{chi_slow_fr[iz * std::max(sd, 1) + i]};
            args[n_sharp - 1] = fast;
            double a_sharp = sharp.kernel(std::span<const Vec>(args.data(), n_sharp))(0, 0);
            double chi_prime = ahat_z[iz] / a_sharp - 1.0;
            acc += w[k + K] * chi_prime * grad_flat.at(iz, 0, 0);
        }
        out.at(ix, 0, 0) = acc;
    });
    return out;
}

// ---------------------------------------------------------------------------
// reduce_one_scale

namespace {

double norm_l2_interval(const GridField& f, double a, double b) {
    Region reg;
    reg.lo[0] = a;
    reg.hi[0] = b;
    return lp_norm(f, 2.0, reg);
}

}  // namespace

ReductionResult reduce_one_scale(const MultiscaleCoefficient& coef, const ScalarFn& F, double r,
                                 double Q, const ReductionOptions& opt) {
    if (coef.dim != 1)
        throw InvalidInput("one-scale reduction is implemented for interval problems (d=1)");
    const double eps_n = coef.scales.back();
    double h = opt.h > 0 ? opt.h : eps_n / opt.grid_factor;
    int N = std::max(16, static_cast<int>(std::lround(1.0 / h)));
    h = 1.0 / N;
    if (!opt.allow_unresolved && h > eps_n / 8.0 + 1e-15)
        throw UnresolvedScale("reduce_one_scale: h does not resolve eps_n");

    SharpTable table = SharpTable::build(coef, Q, opt.slow_m, opt.threads, opt.fast_factor);
    const double eps_fine = table.new_scales().back();
    if (h > eps_fine / 8.0 + 1e-15)
        throw UnresolvedScale("reduce_one_scale: h does not resolve q*eps_n");

    // full multiscale solve on the working interval
    SolveOptions sopt;
    MatFn A = [&coef](const Vec& x) { return coef.eval(x); };
    Rect unit;
    GridField u_eps = solve_dirichlet_raw(1, A, F, {}, {}, unit, h, sopt, nullptr, coef.lambda);
    GridField grad_ue = gradient(u_eps);

    // reduced problem around the center, boundary data from u_eps
    const double c = opt.center;
    double rs = opt.solve_radius_factor * r;
    int i_lo = std::max(0, static_cast<int>(std::lround((c - rs) / h)));
    int i_hi = std::min(N, static_cast<int>(std::lround((c + rs) / h)));
    if (i_hi - i_lo < 8) throw InvalidInput("reduce_one_scale: radius too small for the grid");
    Rect sub;
    sub.lo[0] = i_lo * h;
    sub.hi[0] = i_hi * h;

    MatFn Aflat = [&table](const Vec& x) { return Mat::identity(1, table.a_flat_x(x[0])); };
    ScalarFn gsub = [&](const Vec& x) {
        int i = static_cast<int>(std::lround(x[0] / h));
        return u_eps.at(i);
    };
    GridField u_flat =
        solve_dirichlet_raw(1, Aflat, F, {}, gsub, sub, h, sopt, nullptr, coef.lambda);
    GridField grad_uf = gradient(u_flat);

    GridField U = corrector_term_U(table, u_flat, table.new_scales(), opt.threads);

    // error on B_r, trapezoid with partial end cells
    double a = c - r, b = c + r;
    double err2 = 0.0;
    for (int i = 0; i < u_flat.n[0]; ++i) {
        double x = u_flat.x1(i);
        double w = std::max(0.0, std::min(x + 0.5 * h, b) - std::max(x - 0.5 * h, a));
        if (w <= 0.0) continue;
        int gi = i_lo + i;  // aligned with the parent grid
        double d = grad_ue.at(gi, 0, 0) - grad_uf.at(i, 0, 0) - U.at(i, 0, 0);
        err2 += d * d * w;
    }

    ReductionResult out;
    out.report.Q = Q;
    out.report.q = table.rep().approx.q;
    out.report.new_scales = table.new_scales();
    out.report.eps_n = eps_n;
    out.report.r = r;
    out.report.r_solve = rs;
    out.report.h = h;
    out.report.slow_lattice = table.lattice_points();
    out.report.error = std::sqrt(err2);
    out.report.norm_grad_ue = norm_l2_interval(grad_ue, a, b);
    double a2 = std::max(0.0, c - 2 * r), b2 = std::min(1.0, c + 2 * r);
    out.report.norm_grad_ue_2r = norm_l2_interval(grad_ue, a2, b2);
    out.report.norm_grad_uflat = norm_l2_interval(grad_uf, a, b);
    {
        GridField Ff = GridField::scalar(1, 0.0, 0.0, h, N + 1, 1);
        for (int i = 0; i <= N; ++i) Ff.at(i) = F ? F(Vec{i * h}) : 0.0;
        out.report.norm_F_2r = norm_l2_interval(Ff, a2, b2);
    }
    double denom = out.report.norm_grad_ue_2r + r * out.report.norm_F_2r;
    out.report.energy_constant = denom > 0 ? out.report.norm_grad_uflat / denom : 0.0;
    const int n = coef.n_scales();
    out.report.n = n;
    out.report.tau = coef.holder.tau;
    out.report.bound_proxy = std::pow(std::pow(Q, n - 1) * eps_n / r, opt.sigma_for_proxy) +
                             std::pow(Q, -coef.holder.tau);
    out.u_eps = std::move(u_eps);
    out.u_flat = std::move(u_flat);
    out.U = std::move(U);
    return out;
}

ReductionFamilyResult reduce_family(const std::vector<MultiscaleCoefficient>& family,
                                    const ScalarFn& F, double r, double theta,
                                    const ReductionOptions& opt) {
    if (family.size() < 3) throw InvalidInput("reduce_family needs at least 3 members");
    ReductionFamilyResult out;
    std::vector<std::pair<double, double>> vs_eps, vs_proxy;
    for (const auto& coef : family) {
        double eps_n = coef.scales.back();
        int n = coef.n_scales();
        double Q = std::pow(r / eps_n, theta / (n - 1));
        if (Q <= 1.0) throw InvalidInput("reduce_family: schedule gives Q <= 1; shrink eps");
        ReductionResult res = reduce_one_scale(coef, F, r, Q, opt);
        vs_eps.push_back({eps_n, res.report.error});
        vs_proxy.push_back({std::pow(Q, n - 1) * eps_n / r, res.report.error});
        out.reports.push_back(res.report);
    }
    FitResult fe = fit_rate(vs_eps);
    FitResult fp = fit_rate(vs_proxy);
    out.gamma_hat = fe.slope;
    out.sigma_hat = fp.slope;
    out.nonincreasing = true;
    for (std::size_t k = 0; k + 1 < out.reports.size(); ++k)
        if (out.reports[k + 1].error > out.reports[k].error * 1.10) out.nonincreasing = false;
    for (auto& rep : out.reports) {
        rep.sigma_hat = out.sigma_hat;
        rep.bound_proxy = std::pow(std::pow(rep.Q, rep.n - 1) * rep.eps_n / r, out.sigma_hat) +
                          std::pow(rep.Q, -rep.tau);
    }
    return out;
}

// ---------------------------------------------------------------------------
// locally periodic rate study

RateTable rate_locally_periodic(const LocallyPeriodic1D& a, double lambda,
                                const std::vector<double>& eps_list, const ScalarFn& F,
                                int grid_factor) {
    if (eps_list.size() < 4)
        throw InvalidInput("rate_locally_periodic needs at least 4 eps values");

    // homogenized coefficient on a dense slow lattice, linear interpolation
    const int ML = 4096;
    std::vector<double> ahat(ML + 1);
    for (int k = 0; k <= ML; ++k) {
        double x = static_cast<double>(k) / ML;
        double inv = integrate_adaptive_panels([&](double y) { return 1.0 / a(x, y); }, 0.0, 1.0,
                                               1e-12, 64);
        ahat[k] = 1.0 / inv;
    }
    auto ahat_at = [&](double x) {
        double s = std::clamp(x, 0.0, 1.0) * ML;
        int i = std::min(static_cast<int>(s), ML - 1);
        double t = s - i;
        return (1 - t) * ahat[i] + t * ahat[i + 1];
    };

    RateTable table;
    Mollifier phi(1);
    for (double eps : eps_list) {
        int N = static_cast<int>(std::lround(grid_factor / eps));
        double h = 1.0 / N;
        Rect unit;
        SolveOptions sopt;
        MatFn Ae = [&](const Vec& x) { return Mat::identity(1, a(x[0], frac(x[0] / eps))); };
        MatFn A0 = [&](const Vec& x) { return Mat::identity(1, ahat_at(x[0])); };
        GridField ue = solve_dirichlet_raw(1, Ae, F, {}, {}, unit, h, sopt, nullptr, lambda);
        GridField u0 = solve_dirichlet_raw(1, A0, F, {}, {}, unit, h, sopt, nullptr, lambda);

        RateRow row;
        row.eps = eps;
        row.h = h;
        double l2 = 0.0;
        for (int i = 0; i <= N; ++i) {
            double d = ue.at(i) - u0.at(i);
            double w = (i == 0 || i == N) ? 0.5 : 1.0;
            l2 += d * d * w * h;
        }
        row.l2_err = std::sqrt(l2);

        GridField gue = gradient(ue), gu0 = gradient(u0);
        // smoothed first-order corrector term, kernel chi'(z, y) applied at
        // fast phase x/eps
        const int K = static_cast<int>(std::ceil(0.5 * eps / h));
        std::vector<double> w(2 * K + 1);
        double mass = 0.0;
        for (int k = -K; k <= K; ++k) {
            w[k + K] = phi.eval_r2((k * h / eps) * (k * h / eps));
            mass += w[k + K];
        }
        for (double& v : w) v /= mass;
        double ge2 = 0.0;
        for (int i = 0; i <= N; ++i) {
            double x = i * h;
            double fast = frac(x / eps);
            double corr = 0.0;
            for (int k = -K; k <= K; ++k) {
                int iz = i + k;
                if (iz < 0 || iz > N) continue;
                double z = iz * h;
                double chi_p = ahat_at(z) / a(z, fast) - 1.0;
                corr += w[k + K] * chi_p * gu0.at(iz, 0, 0);
            }
            double d = gue.at(i, 0, 0) - gu0.at(i, 0, 0) - corr;
            double wt = (i == 0 || i == N) ? 0.5 : 1.0;
            ge2 += d * d * wt * h;
        }
        row.grad_err = std::sqrt(ge2);
        row.layer = layer_norm(gu0, 4.0 * eps);
        table.rows.push_back(row);
    }

    double max_err = 0.0;
    for (const auto& row : table.rows) max_err = std::max(max_err, row.l2_err);
    if (max_err <= 1e-9) {
        table.flagged = true;  // coefficient effectively eps-independent
        return table;
    }
    std::vector<std::pair<double, double>> pl, pg;
    for (const auto& row : table.rows) {
        pl.push_back({row.eps, row.l2_err});
        pg.push_back({row.eps, row.grad_err});
    }
    FitResult fl = fit_rate(pl);
    FitResult fg = fit_rate(pg);
    table.slope_l2 = fl.slope;
    table.r2_l2 = fl.r2;
    table.slope_grad = fg.slope;
    table.r2_grad = fg.r2;
    return table;
}

}  // namespace msh
