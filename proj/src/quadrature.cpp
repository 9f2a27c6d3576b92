#include "msh/quadrature.hpp"

namespace msh {

namespace {

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(fa, flm, fm, m - a);
    double right = simpson(fm, frm, fb, b - m);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = simpson(fa, fm, fb, b - a);
    return adapt(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double integrate_adaptive_panels(const std::function<double(double)>& f, double a, double b,
                                 double tol, int panels) {
    if (panels < 1) panels = 1;
    double acc = 0.0;
    double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k)
        acc += integrate_adaptive(f, a + k * h, a + (k + 1) * h, tol / panels);
    return acc;
}

double integrate_midpoint(const std::function<double(double)>& f, double a, double b, int n) {
    double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
    return s * h;
}

}  // namespace msh
