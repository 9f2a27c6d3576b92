#include "msh/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace msh {

Mat MultiscaleCoefficient::eval(const Vec& x) const {
    if (cell_dim != dim)
        throw DimensionMismatch(
            "coefficient has a degenerate cell (cell_dim != dim); lift it before evaluating");
    std::array<Vec, kMaxArgs> args;
    const int n = n_scales();
    for (int i = 0; i < n; ++i) {
        Vec y(dim);
        for (int c = 0; c < dim; ++c) y[c] = frac(x[c] / scales[i]);
        args[i] = y;
    }
    return kernel(std::span<const Vec>(args.data(), n));
}

double MultiscaleCoefficient::eval_scalar(double x) const {
    Vec p(1);
    p[0] = x;
    return eval(p)(0, 0);
}

MultiscaleCoefficient make_coefficient(CoefficientExpr expr, std::vector<double> scales, int dim,
                                       double lambda, HolderData holder, int cell_dim) {
    if (dim != 1 && dim != 2) throw InvalidInput("spatial dimension must be 1 or 2");
    if (scales.empty()) throw InvalidInput("coefficient needs at least one scale");
    if (static_cast<int>(scales.size()) > kMaxArgs)
        throw InvalidInput("too many oscillating scales");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0)) throw InvalidInput("scales must be positive");
        if (i > 0 && scales[i] > scales[i - 1] * (1.0 + 1e-15))
            throw InvalidInput("scales must be sorted nonincreasing");
    }
    if (expr.n_args() > static_cast<int>(scales.size()))
        throw InvalidInput("kernel references more periodic arguments than there are scales");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidInput("ellipticity constant not in (0,1]");

    MultiscaleCoefficient c;
    c.dim = dim;
    c.cell_dim = cell_dim > 0 ? cell_dim : dim;
    c.scales = std::move(scales);
    c.lambda = lambda;
    c.holder = holder;
    auto e = std::make_shared<CoefficientExpr>(std::move(expr));
    c.kernel = [e, dim](std::span<const Vec> args) {
        EvalContext ctx{args, nullptr, {}};
        return e->eval_matrix(ctx, dim);
    };
    return c;
}

ReperiodizationResult reperiodize(const MultiscaleCoefficient& coef, double Q, std::int64_t cap) {
    const int n = coef.n_scales();
    if (n < 2) throw InvalidInput("reperiodize needs at least two scales");

    const double eps_n = coef.scales[n - 1];
    std::vector<double> alphas(n - 1);
    for (int i = 0; i < n - 1; ++i) alphas[i] = eps_n / coef.scales[i];

    ReperiodizationResult out;
    out.approx = simultaneous_approx(alphas, Q, cap);
    const auto& ap = out.approx;

    // Retained slow slots get scale eps_n/gamma_i; gamma_i = 0 means the
    // original argument is an exact integer multiple of the finest one and
    // its scale disappears.
    struct Slot {
        int base_index;
        double scale;
    };
    std::vector<Slot> slots;
    for (int i = 0; i < n - 1; ++i) {
        if (ap.s[i] == 0)
            out.dropped.push_back(i);
        else
            slots.push_back({i, eps_n / ap.gamma[i]});
    }
    std::stable_sort(slots.begin(), slots.end(),
                     [](const Slot& a, const Slot& b) { return a.scale > b.scale; });

    std::vector<int> position(n - 1, -1);  // base slow index -> sharp argument slot
    std::vector<double> new_scales;
    for (std::size_t k = 0; k < slots.size(); ++k) {
        position[slots[k].base_index] = static_cast<int>(k);
        new_scales.push_back(slots[k].scale);
    }
    new_scales.push_back(ap.q * eps_n);

    Kernel base = coef.kernel;
    std::vector<std::int64_t> p = ap.p;
    std::vector<int> s = ap.s;
    const std::int64_t q = ap.q;
    const int cdim = coef.cell_dim;
    Kernel sharp_kernel = [base, p, s, position, q, n, cdim](std::span<const Vec> args) {
        const Vec& yn = args.back();
        std::array<Vec, kMaxArgs> base_args;
        for (int i = 0; i < n - 1; ++i) {
            Vec v(cdim);
            const double pi = static_cast<double>(p[i]);
            if (position[i] >= 0) {
                const Vec& yi = args[position[i]];
                for (int c = 0; c < cdim; ++c) v[c] = frac(s[i] * yi[c] + pi * yn[c]);
            } else {
                for (int c = 0; c < cdim; ++c) v[c] = frac(pi * yn[c]);
            }
            base_args[i] = v;
        }
        Vec v(cdim);
        for (int c = 0; c < cdim; ++c) v[c] = frac(static_cast<double>(q) * yn[c]);
        base_args[n - 1] = v;
        return base(std::span<const Vec>(base_args.data(), n));
    };

    out.sharp.kernel = std::move(sharp_kernel);
    out.sharp.scales = new_scales;
    out.sharp.dim = coef.dim;
    out.sharp.cell_dim = coef.cell_dim;
    out.sharp.lambda = coef.lambda;
    out.sharp.holder = coef.holder;  // same (tau, L) in the slow arguments
    out.new_scales = std::move(new_scales);
    return out;
}

MultiscaleCoefficient lift_quasiperiodic(const MultiscaleCoefficient& B,
                                         const std::vector<std::vector<double>>& M, double eps) {
    if (B.n_scales() != 1) throw InvalidInput("lift_quasiperiodic expects a one-scale kernel");
    if (!(eps > 0.0)) throw InvalidInput("lift_quasiperiodic: eps must be positive");
    const int N = static_cast<int>(M.size());
    if (N == 0 || N != B.cell_dim)
        throw DimensionMismatch("frequency matrix rows must match the kernel cell dimension");
    const int d = B.dim;
    for (const auto& row : M)
        if (static_cast<int>(row.size()) != d)
            throw DimensionMismatch("frequency matrix columns must match the spatial dimension");

    struct Slot {
        int i, j;
        int sign;
        double scale;
    };
    std::vector<Slot> slots;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < d; ++j)
            if (M[i][j] != 0.0)
                slots.push_back({i, j, M[i][j] > 0 ? 1 : -1, eps / std::abs(M[i][j])});
    if (slots.empty()) throw DegenerateMatrix("lift_quasiperiodic: frequency matrix is zero");
    if (static_cast<int>(slots.size()) > kMaxArgs)
        throw InvalidInput("lifted coefficient would exceed the scale cap");
    std::stable_sort(slots.begin(), slots.end(),
                     [](const Slot& a, const Slot& b) { return a.scale > b.scale; });

    Kernel base = B.kernel;
    MultiscaleCoefficient out;
    out.dim = d;
    out.cell_dim = d;
    out.lambda = B.lambda;
    out.holder = B.holder;
    for (const Slot& sl : slots) out.scales.push_back(sl.scale);
    out.kernel = [base, slots, N](std::span<const Vec> args) {
        Vec w(N);
        for (std::size_t k = 0; k < slots.size(); ++k)
            w[slots[k].i] += slots[k].sign * args[k][slots[k].j];
        std::array<Vec, 1> barg{frac(w)};
        return base(std::span<const Vec>(barg.data(), 1));
    };
    return out;
}

namespace {

Vec random_unit(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(d);
    double nrm = 0.0;
    do {
        for (int i = 0; i < d; ++i) v[i] = g(rng);
        nrm = v.norm();
    } while (nrm < 1e-8);
    return (1.0 / nrm) * v;
}

std::vector<Vec> random_args(std::mt19937_64& rng, int n, int cdim) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec> args(n, Vec(cdim));
    for (auto& a : args)
        for (int c = 0; c < cdim; ++c) a[c] = u(rng);
    return args;
}

}  // namespace

SampleReport check_ellipticity(const MultiscaleCoefficient& coef, int n_samples,
                               std::uint64_t seed) {
    if (n_samples < 1) throw InvalidInput("n_samples must be positive");
    std::mt19937_64 rng(seed);
    SampleReport r;
    r.n_samples = n_samples;
    r.min_rayleigh = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_samples; ++k) {
        auto args = random_args(rng, coef.n_scales(), coef.cell_dim);
        Mat a = coef.kernel(args);
        Vec xi = random_unit(rng, coef.dim);
        Vec axi = a.apply(xi);
        r.min_rayleigh = std::min(r.min_rayleigh, dot(xi, axi));
        r.max_gain = std::max(r.max_gain, axi.norm());
    }
    r.pass = r.min_rayleigh >= coef.lambda - 1e-12 && r.max_gain <= 1.0 / coef.lambda + 1e-12;
    return r;
}

SampleReport check_periodicity(const MultiscaleCoefficient& coef, int n_samples,
                               std::uint64_t seed) {
    if (n_samples < 1) throw InvalidInput("n_samples must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> zi(-2, 2);
    SampleReport r;
    r.n_samples = n_samples;
    r.min_rayleigh = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_samples; ++k) {
        auto args = random_args(rng, coef.n_scales(), coef.cell_dim);
        Mat a0 = coef.kernel(args);
        auto shifted = args;
        for (auto& y : shifted)
            for (int c = 0; c < y.n; ++c) y[c] += zi(rng);
        Mat a1 = coef.kernel(shifted);
        r.max_discrepancy = std::max(r.max_discrepancy, (a1 - a0).max_abs());
    }
    r.pass = r.max_discrepancy <= 1e-12;
    return r;
}

SampleReport check_holder(const MultiscaleCoefficient& coef, int n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw InvalidInput("n_samples must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SampleReport r;
    r.n_samples = n_samples;
    r.min_rayleigh = std::numeric_limits<double>::infinity();
    const int n = coef.n_scales();
    if (n < 2) {
        r.pass = true;  // no slow arguments to vary
        return r;
    }
    double worst = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        auto a = random_args(rng, n, coef.cell_dim);
        auto b = a;
        double dist = 0.0;
        for (int i = 0; i < n - 1; ++i) {  // fast argument held fixed
            Vec delta(coef.cell_dim);
            for (int c = 0; c < coef.cell_dim; ++c) delta[c] = 0.2 * (u(rng) - 0.5);
            b[i] = a[i] + delta;
            dist += delta.norm();
        }
        if (dist < 1e-12) continue;
        double num = (coef.kernel(b) - coef.kernel(a)).max_abs();
        worst = std::max(worst, num / std::pow(dist, coef.holder.tau));
    }
    r.max_discrepancy = worst;
    r.pass = worst <= coef.holder.L * (1.0 + 1e-9);
    return r;
}

}  // namespace msh
