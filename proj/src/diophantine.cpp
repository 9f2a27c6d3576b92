#include "msh/diophantine.hpp"

#include <cmath>

namespace msh {

namespace {

std::int64_t ceil_pow(double Q, int m) {
    // ceil(Q^m) without drifting below the true value for exact powers.
    double v = std::pow(Q, m);
    auto c = static_cast<std::int64_t>(std::ceil(v - 1e-12));
    return c < 1 ? 1 : c;
}

// round half to even
std::int64_t round_even(double x) {
    double r = std::nearbyint(x);
    return static_cast<std::int64_t>(r);
}

}  // namespace

RationalApproximation simultaneous_approx(const std::vector<double>& alphas, double Q,
                                          std::int64_t cap) {
    if (alphas.empty()) throw InvalidInput("simultaneous_approx: empty alpha list");
    if (!(Q > 1.0)) throw InvalidInput("simultaneous_approx: Q must exceed 1");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0))
            throw InvalidInput("simultaneous_approx: alpha outside [0,1]");

    const int m = static_cast<int>(alphas.size());
    const std::int64_t q_bound = ceil_pow(Q, m);
    if (q_bound > cap)
        throw CapExceeded("simultaneous_approx: ceil(Q^m) = " + std::to_string(q_bound) +
                          " exceeds cap " + std::to_string(cap));

    RationalApproximation out;
    out.Q = Q;
    out.p.resize(m);
    out.gamma.resize(m);
    out.s.resize(m);

    for (std::int64_t q = 1; q < q_bound; ++q) {
        bool ok = true;
        double bound = 1.0 / (static_cast<double>(q) * Q);
        for (int i = 0; i < m; ++i) {
            std::int64_t pi = round_even(q * alphas[i]);
            double gi = std::abs(alphas[i] - static_cast<double>(pi) / q);
            if (!(gi < bound)) {
                ok = false;
                break;
            }
            out.p[i] = pi;
            out.gamma[i] = gi;
        }
        if (ok) {
            out.q = q;
            for (int i = 0; i < m; ++i) {
                double diff = alphas[i] - static_cast<double>(out.p[i]) / q;
                out.s[i] = out.gamma[i] <= kZeroResidualTol ? 0 : (diff > 0 ? 1 : -1);
                if (out.s[i] == 0) out.gamma[i] = 0.0;
            }
            return out;
        }
    }
    // Dirichlet's theorem guarantees a qualifying q < Q^m exists; reaching
    // this point means the strict inequality failed on an exact boundary.
    throw CapExceeded("simultaneous_approx: no q < " + std::to_string(q_bound) +
                      " met the strict residual bound (boundary-case Q?)");
}

ApproxCertificate verify_approx(const RationalApproximation& approx,
                                const std::vector<double>& alphas, double Q) {
    if (approx.p.size() != alphas.size() || approx.gamma.size() != alphas.size() ||
        approx.s.size() != alphas.size())
        throw DimensionMismatch("verify_approx: field lengths disagree with alpha list");

    const int m = static_cast<int>(alphas.size());
    ApproxCertificate cert;
    cert.q_bound = ceil_pow(Q, m);
    bool ok = approx.q >= 1 && approx.q < cert.q_bound;
    for (int i = 0; i < m; ++i) {
        double diff = alphas[i] - static_cast<double>(approx.p[i]) / approx.q;
        double gi = std::abs(diff);
        double scaled = approx.q * Q * gi;
        cert.worst_scaled_residual = std::max(cert.worst_scaled_residual, scaled);
        if (!(scaled < 1.0)) ok = false;
        if (std::abs(gi - approx.gamma[i]) > 1e-12) ok = false;
        if (alphas[i] >= 0.0 && alphas[i] <= 1.0 && (approx.p[i] < 0 || approx.p[i] > approx.q))
            ok = false;
        int expect_s = gi <= kZeroResidualTol ? 0 : (diff > 0 ? 1 : -1);
        if (approx.s[i] != expect_s) ok = false;
    }
    cert.ok = ok;
    return cert;
}

}  // namespace msh
