#include <doctest.h>

#include <cstdio>
#include <random>

#include "msh/grid.hpp"

using namespace msh;

TEST_CASE("grid round trip through the binary format") {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    GridField f = GridField::vector(2, 0.25, 0.5, 1.0 / 8, 9, 5);
    for (double& v : f.values) v = u(rng);
    std::vector<double> slow{0.1, 0.9, 0.3, 0.7};

    std::string path = "grid_roundtrip_test.bin";
    write_grid(path, f, slow, 3);
    std::vector<double> slow2;
    int ns = 0;
    GridField g = read_grid(path, &slow2, &ns);
    std::remove(path.c_str());

    CHECK(g.dim == f.dim);
    CHECK(g.comp == f.comp);
    CHECK(g.n[0] == f.n[0]);
    CHECK(g.n[1] == f.n[1]);
    CHECK(g.h == f.h);
    CHECK(g.lo[0] == f.lo[0]);
    CHECK(g.lo[1] == f.lo[1]);
    CHECK(g.values == f.values);
    CHECK(slow2 == slow);
    CHECK(ns == 3);
}

TEST_CASE("read rejects foreign files") {
    std::string path = "grid_bogus_test.bin";
    {
        FILE* fp = std::fopen(path.c_str(), "wb");
        std::fputs("not a grid", fp);
        std::fclose(fp);
    }
    CHECK_THROWS_AS(read_grid(path), IoError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_grid("no_such_file_here.bin"), IoError);
}

TEST_CASE("bilinear interpolation reproduces linear fields") {
    GridField f = GridField::scalar(2, 0.0, 0.0, 0.25, 5, 5);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) f.at(i, j) = 2.0 * f.x1(i) - 3.0 * f.x2(j) + 1.0;
    CHECK(f.interpolate(0.33, 0.77) == doctest::Approx(2 * 0.33 - 3 * 0.77 + 1).epsilon(1e-14));
    CHECK(f.interpolate(0.0, 1.0) == doctest::Approx(-2.0).epsilon(1e-14));
}
