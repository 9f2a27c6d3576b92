#include <doctest.h>

#include <cmath>
#include <random>

#include "msh/coefficient.hpp"

using namespace msh;

namespace {

MultiscaleCoefficient two_scale_product(std::vector<double> scales) {
    auto expr = parse_coefficient("(2+sin(2*pi*y1))*(2+cos(2*pi*y2))");
    return make_coefficient(expr, std::move(scales), 1, 1.0 / 9.0, {1.0, 40.0});
}

}  // namespace

TEST_CASE("eval_multiscale substitutes reduced phases") {
    auto cst = make_coefficient(parse_coefficient("2"), {0.5}, 2, 0.5);
    Vec x{0.123, -4.56};
    Mat m = cst.eval(x);
    CHECK(m(0, 0) == 2.0);
    CHECK(m(1, 1) == 2.0);
    CHECK(m(0, 1) == 0.0);

    auto one = make_coefficient(parse_coefficient("2+sin(2*pi*y1)"), {0.1}, 1, 1.0 / 3.0);
    CHECK(one.eval_scalar(0.025) == doctest::Approx(3.0).epsilon(1e-13));

    auto two = make_coefficient(parse_coefficient("2+sin(2*pi*y1)*cos(2*pi*y2)"), {0.1, 0.01}, 1,
                                1.0 / 3.0);
    // arithmetic oracle: 2 + sin(0.1*pi)*cos(pi) = 2 - sin(0.1*pi)
    CHECK(two.eval_scalar(0.005) ==
          doctest::Approx(2.0 - std::sin(0.1 * kPi)).epsilon(1e-12));
    CHECK(two.eval_scalar(0.005) == doctest::Approx(1.690983).epsilon(1e-6));
}

TEST_CASE("phase reduction keeps precision at large x/eps") {
    auto one = make_coefficient(parse_coefficient("2+sin(2*pi*y1)"), {1e-6}, 1, 1.0 / 3.0);
    double x = 0.9375;  // x/eps = 937500 exactly representable
    CHECK(one.eval_scalar(x) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("reperiodize reproduces the paper two-scale example") {
    double eps = 1e-3, delta = 0.01;
    auto coef = two_scale_product({eps, eps * (1.0 / 3.0 + delta)});
    auto res = reperiodize(coef, 30.0);
    CHECK(res.approx.q == 3);
    CHECK(res.approx.p[0] == 1);
    CHECK(res.approx.gamma[0] == doctest::Approx(delta).epsilon(1e-9));
    REQUIRE(res.new_scales.size() == 2);
    // eps_1' = eps_2/delta, eps_2' = 3*eps_2 = eps(1+3 delta)
    CHECK(res.new_scales[0] ==
          doctest::Approx(eps * (1.0 / 3.0 + delta) / delta).epsilon(1e-9));
    CHECK(res.new_scales[1] == doctest::Approx(eps * (1.0 + 3.0 * delta)).epsilon(1e-12));

    // A_sharp(y1,y2) = A(y1+y2, 3 y2) pointwise
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        Vec y1{u(rng)}, y2{u(rng)};
        std::array<Vec, 2> args{y1, y2};
        double got = res.sharp.kernel(std::span<const Vec>(args.data(), 2))(0, 0);
        std::array<Vec, 2> expect_args{Vec{frac(y1[0] + y2[0])}, Vec{frac(3.0 * y2[0])}};
        double expect = coef.kernel(std::span<const Vec>(expect_args.data(), 2))(0, 0);
        CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("reperiodize pointwise identity and Q-separation") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double Q : {5.0, 30.0}) {
        auto coef = two_scale_product({3.7e-3, 1.1e-3});
        auto res = reperiodize(coef, Q);
        for (std::size_t i = 0; i + 1 < res.new_scales.size(); ++i)
            CHECK(res.new_scales[i] / res.new_scales.back() >= Q);
        for (int k = 0; k < 1000; ++k) {
            Vec x{u(rng)};
            double ref = coef.eval(x)(0, 0);
            double got = res.sharp.eval(x)(0, 0);
            CHECK(std::abs(ref - got) <= 1e-10 * (1.0 + std::abs(ref)));
        }
    }
}

TEST_CASE("already separated scales give q=1 and unchanged field") {
    auto coef = two_scale_product({1.0, 1e-4});
    auto res = reperiodize(coef, 10.0);
    CHECK(res.approx.q == 1);
    CHECK(res.approx.p[0] == 0);
    CHECK(res.approx.gamma[0] == doctest::Approx(1e-4).epsilon(1e-12));
    REQUIRE(res.new_scales.size() == 2);
    CHECK(res.new_scales[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.new_scales[1] == doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("exact rational ratio drops a scale") {
    double eps0 = 0.01;
    auto coef = two_scale_product({2.0 * eps0, eps0});
    // at Q=3 the scan reaches q=2 where alpha=1/2 is exact
    auto res = reperiodize(coef, 3.0);
    CHECK(res.approx.q == 2);
    CHECK(res.approx.p[0] == 1);
    CHECK(res.approx.s[0] == 0);
    CHECK(res.dropped == std::vector<int>{0});
    REQUIRE(res.new_scales.size() == 1);
    CHECK(res.new_scales[0] == doctest::Approx(2.0 * eps0).epsilon(1e-14));
    CHECK(res.sharp.n_scales() == 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        Vec x{u(rng)};
        CHECK(res.sharp.eval(x)(0, 0) ==
              doctest::Approx(coef.eval(x)(0, 0)).epsilon(1e-11));
    }

    // the literal Q=1.5 input qualifies already at q=1 (gamma=1/2 < 1/(1*1.5));
    // the smallest-denominator contract wins and nothing is dropped
    auto res15 = reperiodize(coef, 1.5);
    CHECK(res15.approx.q == 1);
    CHECK(res15.approx.p[0] == 0);
    CHECK(res15.dropped.empty());
}

TEST_CASE("reperiodize preserves Hoelder data in slow arguments") {
    auto coef = two_scale_product({5e-3, 2.3e-3});
    coef.holder = {1.0, 4.0 * kPi * 3.0};  // |d/dy1 (2+sin 2pi y1)(2+cos)| <= 2pi*3
    auto res = reperiodize(coef, 12.0);
    CHECK(res.sharp.holder.tau == coef.holder.tau);
    CHECK(res.sharp.holder.L == coef.holder.L);
    auto rep = check_holder(res.sharp, 4000, 99);
    CHECK(rep.pass);
}

TEST_CASE("reperiodize in two dimensions acts componentwise") {
    auto expr = parse_coefficient(
        "[[2+cos(2*pi*y1[1])*cos(2*pi*y2[2]), 0.2*sin(2*pi*y2[1])],"
        "[0.2*sin(2*pi*y2[1]), 2+0.5*sin(2*pi*y1[2])]]");
    auto coef = make_coefficient(expr, {4.1e-3, 1.37e-3}, 2, 0.2, {1.0, 30.0});
    auto res = reperiodize(coef, 12.0);
    CHECK(res.new_scales[0] / res.new_scales.back() >= 12.0);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        Vec x{u(rng), u(rng)};
        Mat ref = coef.eval(x);
        Mat got = res.sharp.eval(x);
        CHECK((got - ref).max_abs() <= 1e-10 * (1.0 + ref.max_abs()));
    }
}

TEST_CASE("three-scale reperiodization sorts slow scales") {
    auto expr = parse_coefficient("(2+sin(2*pi*y1))*(2+cos(2*pi*y2))+sin(2*pi*y3)");
    auto coef = make_coefficient(expr, {7.3e-3, 2.9e-3, 1.7e-3}, 1, 0.05, {1.0, 60.0});
    auto res = reperiodize(coef, 5.0);
    for (std::size_t i = 0; i + 1 < res.new_scales.size(); ++i)
        CHECK(res.new_scales[i] >= res.new_scales[i + 1]);
    for (std::size_t i = 0; i + 1 < res.new_scales.size(); ++i)
        CHECK(res.new_scales[i] / res.new_scales.back() >= 5.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        Vec x{u(rng)};
        double ref = coef.eval(x)(0, 0);
        CHECK(std::abs(res.sharp.eval(x)(0, 0) - ref) <= 1e-10 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("lift_quasiperiodic identity and scale lists") {
    auto bexpr = parse_coefficient("2+sin(2*pi*y1)");
    auto B = make_coefficient(bexpr, {1.0}, 1, 1.0 / 3.0);

    SUBCASE("identity lift") {
        auto lifted = lift_quasiperiodic(B, {{1.0}}, 0.1);
        REQUIRE(lifted.scales.size() == 1);
        CHECK(lifted.scales[0] == doctest::Approx(0.1));
        for (double x : {0.013, 0.57, -0.21})
            CHECK(lifted.eval(Vec{x})(0, 0) ==
                  doctest::Approx(2.0 + std::sin(2.0 * kPi * x / 0.1)).epsilon(1e-12));
    }

    SUBCASE("irrational frequency against direct evaluation") {
        double root2 = std::sqrt(2.0);
        auto lifted = lift_quasiperiodic(B, {{root2}}, 0.01);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int k = 0; k < 100; ++k) {
            double x = u(rng);
            double direct = 2.0 + std::sin(2.0 * kPi * root2 * x / 0.01);
            double got = lifted.eval(Vec{x})(0, 0);
            CHECK(std::abs(got - direct) <= 1e-12 * (1.0 + std::abs(direct)));
        }
    }

    SUBCASE("two-frequency golden ratio structural check") {
        double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        auto bexpr2 = parse_coefficient("2+0.5*sin(2*pi*y1[1])+0.5*cos(2*pi*y1[2])");
        auto B2 = make_coefficient(bexpr2, {1.0}, 1, 0.25, {}, 2);
        double eps = 0.05;
        auto lifted = lift_quasiperiodic(B2, {{1.0}, {phi}}, eps);
        REQUIRE(lifted.scales.size() == 2);
        CHECK(lifted.scales[0] == doctest::Approx(eps));
        CHECK(lifted.scales[1] == doctest::Approx(eps / phi));
    }

    SUBCASE("zero matrix is degenerate") {
        CHECK_THROWS_AS(lift_quasiperiodic(B, {{0.0}}, 0.1), DegenerateMatrix);
    }
}

TEST_CASE("construction and cap errors") {
    auto expr = parse_coefficient("2+sin(2*pi*y1)");
    CHECK_THROWS_AS(make_coefficient(expr, {}, 1, 0.5), InvalidInput);
    CHECK_THROWS_AS(make_coefficient(expr, {0.01, 0.1}, 1, 0.5), InvalidInput);  // unsorted
    CHECK_THROWS_AS(make_coefficient(expr, {-0.1}, 1, 0.5), InvalidInput);
    CHECK_THROWS_AS(make_coefficient(expr, {0.1}, 1, 1.5), InvalidInput);
    auto e2 = parse_coefficient("2+sin(2*pi*y2)");
    CHECK_THROWS_AS(make_coefficient(e2, {0.1}, 1, 0.5), InvalidInput);  // y2 but one scale

    // cap propagates through reperiodization
    auto coef = two_scale_product({0.1, 0.033});
    CHECK_THROWS_AS(reperiodize(coef, 1e9), CapExceeded);

    // lifted base with a degenerate cell cannot be evaluated directly
    auto bexpr = parse_coefficient("2+0.5*sin(2*pi*y1[1])+0.5*cos(2*pi*y1[2])");
    auto B = make_coefficient(bexpr, {1.0}, 1, 0.25, {}, 2);
    CHECK_THROWS_AS(B.eval(Vec{0.3}), DimensionMismatch);
}

TEST_CASE("structural spot checks") {
    auto id = make_coefficient(parse_coefficient("1"), {0.1}, 2, 1.0);
    auto rep = check_ellipticity(id, 500, 1);
    CHECK(rep.pass);
    CHECK(rep.min_rayleigh == doctest::Approx(1.0));

    auto good = make_coefficient(parse_coefficient("2+sin(2*pi*y1)"), {0.1}, 1, 1.0 / 3.0);
    auto r2 = check_ellipticity(good, 2000, 2);
    CHECK(r2.pass);
    CHECK(r2.min_rayleigh >= 1.0);

    // a(y) = sin(2 pi y) vanishes: must fail the declared lambda = 0.5
    auto bad = make_coefficient(parse_coefficient("sin(2*pi*y1)"), {0.1}, 1, 0.5);
    CHECK_FALSE(check_ellipticity(bad, 2000, 3).pass);

    auto per = check_periodicity(good, 500, 4);
    CHECK(per.pass);
    CHECK(per.max_discrepancy <= 1e-12);
}
