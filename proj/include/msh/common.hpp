#ifndef MSH_COMMON_HPP
#define MSH_COMMON_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

namespace msh {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kMaxDim = 4;   // component cap for periodic arguments
inline constexpr int kMaxArgs = 8;  // cap on number of oscillating scales

/// Small fixed-capacity vector for points and periodic-cell arguments.
struct Vec {
    int n = 0;
    std::array<double, kMaxDim> c{};

    Vec() = default;
    explicit Vec(int dim) : n(dim) {}
    Vec(std::initializer_list<double> xs) {
        n = static_cast<int>(xs.size());
        int i = 0;
        for (double x : xs) c[i++] = x;
    }
    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }

    double norm() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += c[i] * c[i];
        return std::sqrt(s);
    }
};

inline Vec operator+(Vec a, const Vec& b) {
    for (int i = 0; i < a.n; ++i) a.c[i] += b.c[i];
    return a;
}
inline Vec operator-(Vec a, const Vec& b) {
    for (int i = 0; i < a.n; ++i) a.c[i] -= b.c[i];
    return a;
}
inline Vec operator*(double s, Vec a) {
    for (int i = 0; i < a.n; ++i) a.c[i] *= s;
    return a;
}
inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.n; ++i) s += a.c[i] * b.c[i];
    return s;
}

/// Dense d x d matrix, d <= 2 in this project.
struct Mat {
    int d = 0;
    std::array<std::array<double, 2>, 2> m{};

    Mat() = default;
    explicit Mat(int dim) : d(dim) {}
    static Mat identity(int dim, double s = 1.0) {
        Mat a(dim);
        for (int i = 0; i < dim; ++i) a.m[i][i] = s;
        return a;
    }
    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    Vec apply(const Vec& x) const {
        Vec y(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) y.c[i] += m[i][j] * x.c[j];
        return y;
    }
    double max_abs() const {
        double s = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s = std::max(s, std::abs(m[i][j]));
        return s;
    }
};

inline Mat operator-(Mat a, const Mat& b) {
    for (int i = 0; i < a.d; ++i)
        for (int j = 0; j < a.d; ++j) a.m[i][j] -= b.m[i][j];
    return a;
}

/// Fractional part in [0,1). Large arguments keep the periodic phase;
/// computing this before kernel evaluation avoids catastrophic loss
/// of precision at x/eps ~ 1e6.
inline double frac(double t) {
    double f = t - std::floor(t);
    if (f >= 1.0) f = 0.0;  // guards against floor rounding at negative ulps
    return f;
}

inline Vec frac(Vec v) {
    for (int i = 0; i < v.n; ++i) v.c[i] = frac(v.c[i]);
    return v;
}

/// FNV-1a, used for config hashes and CSV fingerprints.
inline std::uint64_t fnv1a(std::span<const char> bytes, std::uint64_t seed = 1469598103934665603ull) {
    std::uint64_t h = seed;
    for (char b : bytes) {
        h ^= static_cast<unsigned char>(b);
        h *= 1099511628211ull;
    }
    return h;
}
inline std::uint64_t fnv1a(const std::string& s) {
    return fnv1a(std::span<const char>(s.data(), s.size()));
}

/// Fixed, locale-independent formatting so reports are byte-reproducible.
std::string format_double(double v);

}  // namespace msh

#endif
