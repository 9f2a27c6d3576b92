#include "msh/grid.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace msh {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

GridField GridField::scalar(int dim, double lo1, double lo2, double h, int n1, int n2) {
    GridField f;
    f.dim = dim;
    f.comp = 1;
    f.lo[0] = lo1;
    f.lo[1] = lo2;
    f.h = h;
    f.n[0] = n1;
    f.n[1] = dim == 2 ? n2 : 1;
    f.values.assign(static_cast<std::size_t>(f.n[0]) * f.n[1], 0.0);
    return f;
}

GridField GridField::vector(int dim, double lo1, double lo2, double h, int n1, int n2) {
    GridField f = scalar(dim, lo1, lo2, h, n1, n2);
    f.comp = dim;
    f.values.assign(static_cast<std::size_t>(f.n[0]) * f.n[1] * dim, 0.0);
    return f;
}

double GridField::interpolate(double x, double y, int c) const {
    auto clamp01 = [](double t, double tmax) { return std::min(std::max(t, 0.0), tmax); };
    double s = clamp01((x - lo[0]) / h, n[0] - 1.0);
    int i = std::min(static_cast<int>(s), n[0] - 2);
    if (n[0] == 1) i = 0;
    double a = s - i;
    if (dim == 1) {
        if (n[0] == 1) return at(0, 0, c);
        return (1 - a) * at(i, 0, c) + a * at(i + 1, 0, c);
    }
    double t = clamp01((y - lo[1]) / h, n[1] - 1.0);
    int j = std::min(static_cast<int>(t), n[1] - 2);
    if (n[1] == 1) j = 0;
    double b = t - j;
    return (1 - a) * (1 - b) * at(i, j, c) + a * (1 - b) * at(i + 1, j, c) +
           (1 - a) * b * at(i, j + 1, c) + a * b * at(i + 1, j + 1, c);
}

namespace {
constexpr char kMagic[8] = {'M', 'S', 'G', 'R', 'I', 'D', '0', '1'};

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
}  // namespace

void write_grid(const std::string& path, const GridField& f, const std::vector<double>& slow_coords,
                int n_scales) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os.write(kMagic, 8);
    put<std::int32_t>(os, f.dim);
    put<std::int32_t>(os, n_scales);
    put<std::int32_t>(os, f.comp);
    put<std::int32_t>(os, f.n[0]);
    put<std::int32_t>(os, f.n[1]);
    put<double>(os, f.lo[0]);
    put<double>(os, f.lo[1]);
    put<double>(os, f.h);
    put<std::int32_t>(os, static_cast<std::int32_t>(slow_coords.size()));
    for (double v : slow_coords) put<double>(os, v);
    for (double v : f.values) put<double>(os, v);
    if (!os) throw IoError("write failed for '" + path + "'");
}

GridField read_grid(const std::string& path, std::vector<double>* slow_coords, int* n_scales) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw IoError("'" + path + "' is not a grid file");
    GridField f;
    f.dim = get<std::int32_t>(is);
    int ns = get<std::int32_t>(is);
    f.comp = get<std::int32_t>(is);
    f.n[0] = get<std::int32_t>(is);
    f.n[1] = get<std::int32_t>(is);
    f.lo[0] = get<double>(is);
    f.lo[1] = get<double>(is);
    f.h = get<double>(is);
    int nslow = get<std::int32_t>(is);
    std::vector<double> slow(nslow);
    for (double& v : slow) v = get<double>(is);
    f.values.assign(static_cast<std::size_t>(f.n[0]) * f.n[1] * f.comp, 0.0);
    for (double& v : f.values) v = get<double>(is);
    if (!is) throw IoError("truncated grid file '" + path + "'");
    if (slow_coords) *slow_coords = std::move(slow);
    if (n_scales) *n_scales = ns;
    return f;
}

}  // namespace msh
