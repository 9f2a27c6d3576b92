#include "msh/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "msh/elliptic.hpp"
#include "msh/fit.hpp"
#include "msh/operators.hpp"
#include "msh/parallel.hpp"

namespace msh {

namespace {

using json = nlohmann::ordered_json;
constexpr const char* kVersion = "0.1.0";

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw SchemaError(path.empty() ? key : path + "." + key, "unknown key");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(path.empty() ? key : path + "." + key, e.what());
    }
}

ForcingSpec parse_forcing(const json& obj, const std::string& path) {
    ForcingSpec fs;
    check_keys(obj, path, {"expr", "preset"});
    fs.expr = get_or<std::string>(obj, path, "expr", "");
    fs.preset = get_or<std::string>(obj, path, "preset", "");
    if (!fs.expr.empty() && !fs.preset.empty())
        throw SchemaError(path, "give either expr or preset, not both");
    if (!fs.preset.empty() && fs.preset != "smooth" && fs.preset != "step")
        throw SchemaError(path + ".preset", "unknown preset '" + fs.preset + "'");
    return fs;
}

}  // namespace

SweepConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError("", std::string("not valid JSON: ") + e.what());
    }
    check_keys(root, "",
               {"name", "kind", "dim", "coefficient", "family", "qp", "f", "F", "p",
                "grid_factor", "max_nodes", "lipschitz", "seed"});

    SweepConfig cfg;
    cfg.name = get_or<std::string>(root, "", "name", "sweep");
    cfg.kind = get_or<std::string>(root, "", "kind", "cz");
    if (cfg.kind != "cz" && cfg.kind != "lipschitz" && cfg.kind != "quasiperiodic")
        throw SchemaError("kind", "must be cz, lipschitz or quasiperiodic");
    cfg.dim = get_or<int>(root, "", "dim", 1);
    if (cfg.dim != 1 && cfg.dim != 2) throw SchemaError("dim", "must be 1 or 2");

    if (root.contains("coefficient")) {
        const json& c = root["coefficient"];
        check_keys(c, "coefficient", {"expr", "scales", "lambda", "tau", "L"});
        cfg.coefficient.expr = get_or<std::string>(c, "coefficient", "expr", "");
        cfg.coefficient.scales =
            get_or<std::vector<double>>(c, "coefficient", "scales", {});
        cfg.coefficient.lambda = get_or<double>(c, "coefficient", "lambda", 0.25);
        cfg.coefficient.tau = get_or<double>(c, "coefficient", "tau", 1.0);
        cfg.coefficient.L = get_or<double>(c, "coefficient", "L", 50.0);
        try {
            if (!cfg.coefficient.expr.empty()) parse_coefficient(cfg.coefficient.expr);
        } catch (const Error& e) {
            throw SchemaError("coefficient.expr", e.what());
        }
    }
    if (root.contains("family")) {
        const json& fam = root["family"];
        check_keys(fam, "family", {"eps1", "rules"});
        cfg.family.eps1 = get_or<std::vector<double>>(fam, "family", "eps1", {});
        cfg.family.rules = get_or<std::vector<std::string>>(fam, "family", "rules", {});
        for (const auto& rule : cfg.family.rules) {
            try {
                parse_scalar(rule, {"eps1"});
            } catch (const Error& e) {
                throw SchemaError("family.rules", e.what());
            }
        }
        for (double e : cfg.family.eps1)
            if (!(e > 0.0)) throw SchemaError("family.eps1", "values must be positive");
    }
    if (root.contains("qp")) {
        const json& qp = root["qp"];
        check_keys(qp, "qp", {"B", "M", "lambda", "tau", "L"});
        cfg.qp.B = get_or<std::string>(qp, "qp", "B", "");
        cfg.qp.M = get_or<std::vector<std::vector<double>>>(qp, "qp", "M", {});
        cfg.qp.lambda = get_or<double>(qp, "qp", "lambda", 0.25);
        cfg.qp.tau = get_or<double>(qp, "qp", "tau", 1.0);
        cfg.qp.L = get_or<double>(qp, "qp", "L", 50.0);
        try {
            if (!cfg.qp.B.empty()) parse_coefficient(cfg.qp.B);
        } catch (const Error& e) {
            throw SchemaError("qp.B", e.what());
        }
    }
    if (root.contains("f")) cfg.f = parse_forcing(root["f"], "f");
    if (root.contains("F")) cfg.F = parse_forcing(root["F"], "F");
    if (root.contains("p")) {
        cfg.p_list = get_or<std::vector<double>>(root, "", "p", cfg.p_list);
        for (double p : cfg.p_list)
            if (!(p > 1.0) || std::isinf(p))
                throw SchemaError("p", "exponents must lie strictly between 1 and infinity");
    }
    cfg.grid_factor = get_or<double>(root, "", "grid_factor", 16.0);
    if (!(cfg.grid_factor >= 2.0)) throw SchemaError("grid_factor", "must be at least 2");
    cfg.max_nodes = get_or<long>(root, "", "max_nodes", 4000000L);
    if (root.contains("lipschitz")) {
        const json& l = root["lipschitz"];
        check_keys(l, "lipschitz", {"alpha", "ladder", "p", "delta_index"});
        cfg.lip.alpha = get_or<double>(l, "lipschitz", "alpha", 0.25);
        cfg.lip.ladder = get_or<int>(l, "lipschitz", "ladder", 12);
        cfg.lip.p = get_or<double>(l, "lipschitz", "p", 4.0);
        cfg.lip.delta_index = get_or<int>(l, "lipschitz", "delta_index", 0);
        if (!(cfg.lip.alpha > 0.0 && cfg.lip.alpha < 1.0))
            throw SchemaError("lipschitz.alpha", "alpha must lie in (0,1)");
        if (cfg.lip.ladder < 3) throw SchemaError("lipschitz.ladder", "need at least 3 radii");
    }
    cfg.seed = get_or<std::uint64_t>(root, "", "seed", 0);
    return cfg;
}

SweepConfig parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

std::string emit_config(const SweepConfig& cfg) {
    json root;
    root["name"] = cfg.name;
    root["kind"] = cfg.kind;
    root["dim"] = cfg.dim;
    root["coefficient"] = {{"expr", cfg.coefficient.expr},
                           {"scales", cfg.coefficient.scales},
                           {"lambda", cfg.coefficient.lambda},
                           {"tau", cfg.coefficient.tau},
                           {"L", cfg.coefficient.L}};
    root["family"] = {{"eps1", cfg.family.eps1}, {"rules", cfg.family.rules}};
    root["qp"] = {{"B", cfg.qp.B},
                  {"M", cfg.qp.M},
                  {"lambda", cfg.qp.lambda},
                  {"tau", cfg.qp.tau},
                  {"L", cfg.qp.L}};
    root["f"] = {{"expr", cfg.f.expr}, {"preset", cfg.f.preset}};
    root["F"] = {{"expr", cfg.F.expr}, {"preset", cfg.F.preset}};
    root["p"] = cfg.p_list;
    root["grid_factor"] = cfg.grid_factor;
    root["max_nodes"] = cfg.max_nodes;
    root["lipschitz"] = {{"alpha", cfg.lip.alpha},
                         {"ladder", cfg.lip.ladder},
                         {"p", cfg.lip.p},
                         {"delta_index", cfg.lip.delta_index}};
    root["seed"] = cfg.seed;
    return root.dump(2);
}

std::uint64_t config_hash(const SweepConfig& cfg) { return fnv1a(emit_config(cfg)); }

// ---------------------------------------------------------------------------
// instance machinery

namespace {

VectorFn make_forcing_vec(const ForcingSpec& fs, int dim) {
    if (fs.preset == "step") {
        return [dim](const Vec& x) {
            Vec v(dim);
            v[0] = (x[0] >= 0.25 && x[0] < 0.75) ? 1.0 : 0.0;
            return v;
        };
    }
    if (fs.preset == "smooth" || fs.empty()) {
        return [dim](const Vec& x) {
            Vec v(dim);
            if (dim == 1) {
                v[0] = std::sin(2.0 * kPi * x[0]) + 0.3 * std::cos(6.0 * kPi * x[0]) + 0.2;
            } else {
                v[0] = std::sin(2.0 * kPi * x[0]) * std::sin(2.0 * kPi * x[1]);
                v[1] = 0.5 * std::cos(2.0 * kPi * x[0]);
            }
            return v;
        };
    }
    auto expr = std::make_shared<ScalarExpr>(parse_scalar(fs.expr));
    return [expr, dim](const Vec& x) {
        Vec v(dim);
        EvalContext ctx{{}, &x, {}};
        v[0] = expr->eval(ctx);
        return v;
    };
}

ScalarFn make_forcing_scalar(const ForcingSpec& fs) {
    if (fs.empty()) return [](const Vec&) { return 1.0; };
    if (fs.preset == "step")
        return [](const Vec& x) { return (x[0] >= 0.25 && x[0] < 0.75) ? 1.0 : 0.0; };
    if (fs.preset == "smooth")
        return [](const Vec& x) { return std::sin(2.0 * kPi * x[0]) + 1.5; };
    auto expr = std::make_shared<ScalarExpr>(parse_scalar(fs.expr));
    return [expr](const Vec& x) {
        EvalContext ctx{{}, &x, {}};
        return expr->eval(ctx);
    };
}

std::vector<std::vector<double>> family_scales(const SweepConfig& cfg) {
    std::vector<std::vector<double>> out;
    if (cfg.family.empty()) {
        if (cfg.coefficient.scales.empty())
            throw InvalidInput("config needs coefficient.scales or a family");
        out.push_back(cfg.coefficient.scales);
        return out;
    }
    if (cfg.family.rules.empty()) throw InvalidInput("family needs scale rules");
    std::vector<ScalarExpr> rules;
    for (const auto& r : cfg.family.rules) rules.push_back(parse_scalar(r, {"eps1"}));
    for (double e1 : cfg.family.eps1) {
        std::vector<double> scales;
        double named[1] = {e1};
        for (const auto& rule : rules) {
            EvalContext ctx{{}, nullptr, std::span<const double>(named, 1)};
            scales.push_back(rule.eval(ctx));
        }
        std::sort(scales.begin(), scales.end(), std::greater<double>());
        out.push_back(std::move(scales));
    }
    return out;
}

double sample_lp_norm_fn(const std::function<double(const Vec&)>& mag, int dim, double p, int N) {
    // instance-local functional norms use the same grid quadrature as fields
    GridField f = GridField::scalar(dim, 0.0, 0.0, 1.0 / N, N + 1, dim == 2 ? N + 1 : 1);
    for (int j = 0; j < f.n[1]; ++j)
        for (int i = 0; i < f.n[0]; ++i) {
            Vec x{f.x1(i), dim == 2 ? f.x2(j) : 0.0};
            x.n = dim;
            f.at(i, j) = mag(x);
        }
    return lp_norm(f, p);
}

// Face-midpoint quadrature on the interval: the flux-form solve makes face
// differences second-order everywhere, so the CZ ratio carries no one-sided
// boundary-stencil artifact and is grid-stable for smooth periodic data.
double face_grad_lp_1d(const GridField& u, double p) {
    double acc = 0.0;
    for (int i = 0; i + 1 < u.n[0]; ++i)
        acc += std::pow(std::abs((u.at(i + 1) - u.at(i)) / u.h), p) * u.h;
    return std::pow(acc, 1.0 / p);
}

double face_fn_lp_1d(const std::function<double(const Vec&)>& mag, const GridField& u, double p) {
    double acc = 0.0;
    for (int i = 0; i + 1 < u.n[0]; ++i)
        acc += std::pow(std::abs(mag(Vec{u.x1(i) + 0.5 * u.h})), p) * u.h;
    return std::pow(acc, 1.0 / p);
}

std::string pkey(double p) {
    std::ostringstream os;
    os << "R[p=" << p << "]";
    return os.str();
}

struct CzVerdict {
    bool pass;
    std::string text;
    std::vector<std::pair<std::string, double>> aggregates;
};

CzVerdict cz_verdict(const std::vector<InstanceRecord>& records,
                     const std::vector<double>& p_list) {
    CzVerdict v{true, "", {}};
    std::ostringstream txt;
    for (double p : p_list) {
        std::vector<std::pair<double, double>> pairs;
        double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
        for (const auto& rec : records) {
            if (!rec.error.empty()) continue;
            for (const auto& [k, val] : rec.values)
                if (k == pkey(p)) {
                    pairs.push_back({1.0 / rec.eps.back(), val});
                    rmin = std::min(rmin, val);
                    rmax = std::max(rmax, val);
                }
        }
        if (pairs.size() < 3) {
            v.pass = false;
            txt << "p=" << p << ": too few instances; ";
            continue;
        }
        FitResult fit = fit_rate(pairs);
        double spread = rmax / rmin;
        bool ok = std::abs(fit.slope) <= 0.05 && spread <= 3.0;
        v.pass = v.pass && ok;
        std::ostringstream sk, spk;
        sk << "slope[p=" << p << "]";
        spk << "spread[p=" << p << "]";
        v.aggregates.push_back({sk.str(), fit.slope});
        v.aggregates.push_back({spk.str(), spread});
        txt << "p=" << p << ": slope=" << format_double(fit.slope)
            << " spread=" << format_double(spread) << (ok ? " OK" : " FAIL") << "; ";
    }
    v.text = txt.str();
    std::sort(v.aggregates.begin(), v.aggregates.end());
    return v;
}

ExperimentReport run_cz_instances(const SweepConfig& cfg,
                                  const std::vector<MultiscaleCoefficient>& instances,
                                  int threads) {
    ExperimentReport rep;
    rep.name = cfg.name;
    rep.kind = cfg.kind;
    rep.seed = cfg.seed;
    rep.version = kVersion;
    rep.config_hash = config_hash(cfg);
    rep.records.resize(instances.size());

    for (double p : cfg.p_list)
        if (!(p > 1.0) || std::isinf(p))
            throw InvalidInput("CZ sweep requires 1 < p < infinity");

    VectorFn f = make_forcing_vec(cfg.f, cfg.dim);

    parallel_for(instances.size(), threads, [&](std::size_t k) {
        InstanceRecord& rec = rep.records[k];
        rec.index = static_cast<int>(k);
        const MultiscaleCoefficient& coef = instances[k];
        rec.eps = coef.scales;
        try {
            double eps_n = coef.scales.back();
            int N = static_cast<int>(std::ceil(cfg.grid_factor / eps_n));
            if (static_cast<long>(N) + 1 > cfg.max_nodes)
                throw UnresolvedScale("grid budget exceeded; instance skipped");
            double h = 1.0 / N;
            rec.h = h;
            SolveOptions sopt;
            GridField u = solve_dirichlet(coef, {}, f, h, sopt);
            auto fnorm = [&](const Vec& x) { return f(x).norm(); };
            if (cfg.dim == 1) {
                for (double p : cfg.p_list)
                    rec.values.push_back(
                        {pkey(p), face_grad_lp_1d(u, p) / face_fn_lp_1d(fnorm, u, p)});
            } else {
                GridField gu = gradient(u);
                for (double p : cfg.p_list)
                    rec.values.push_back(
                        {pkey(p), lp_norm(gu, p) / sample_lp_norm_fn(fnorm, cfg.dim, p, N)});
            }
            std::sort(rec.values.begin(), rec.values.end());
        } catch (const std::exception& e) {
            rec.error = e.what();  // isolation: the sweep keeps going
        }
    });

    CzVerdict v = cz_verdict(rep.records, cfg.p_list);
    rep.pass = v.pass;
    rep.verdict = v.text;
    rep.aggregates = v.aggregates;

    // rates.csv: one row per (instance, p)
    std::size_t max_eps = 0;
    for (const auto& r : rep.records) max_eps = std::max(max_eps, r.eps.size());
    std::ostringstream csv;
    csv << "idx";
    for (std::size_t i = 0; i < max_eps; ++i) csv << ",eps" << (i + 1);
    csv << ",h,p,R,error\n";
    for (const auto& r : rep.records)
        for (double p : cfg.p_list) {
            csv << r.index;
            for (std::size_t i = 0; i < max_eps; ++i)
                csv << "," << (i < r.eps.size() ? format_double(r.eps[i]) : "");
            csv << "," << format_double(r.h) << "," << format_double(p) << ",";
            for (const auto& [kk, val] : r.values)
                if (kk == pkey(p)) csv << format_double(val);
            csv << "," << r.error << "\n";
        }
    rep.csv_name = "rates.csv";
    rep.csv = csv.str();
    return rep;
}

}  // namespace

ExperimentReport run_cz_sweep(const SweepConfig& cfg, int threads) {
    CoefficientExpr expr = parse_coefficient(cfg.coefficient.expr);
    std::vector<MultiscaleCoefficient> instances;
    for (auto& scales : family_scales(cfg))
        instances.push_back(make_coefficient(expr, scales, cfg.dim, cfg.coefficient.lambda,
                                             {cfg.coefficient.tau, cfg.coefficient.L}));
    return run_cz_instances(cfg, instances, threads);
}

ExperimentReport run_quasiperiodic(const SweepConfig& cfg, int threads) {
    if (cfg.qp.B.empty() || cfg.qp.M.empty())
        throw InvalidInput("quasiperiodic sweep needs qp.B and qp.M");
    if (cfg.family.eps1.empty())
        throw InvalidInput("quasiperiodic sweep needs family.eps1 (lift scales)");
    CoefficientExpr bexpr = parse_coefficient(cfg.qp.B);
    const int N = static_cast<int>(cfg.qp.M.size());
    MultiscaleCoefficient B = make_coefficient(bexpr, {1.0}, cfg.dim, cfg.qp.lambda,
                                               {cfg.qp.tau, cfg.qp.L}, N);
    std::vector<MultiscaleCoefficient> instances;
    for (double eps : cfg.family.eps1) instances.push_back(lift_quasiperiodic(B, cfg.qp.M, eps));
    ExperimentReport rep = run_cz_instances(cfg, instances, threads);
    rep.kind = "quasiperiodic";
    return rep;
}

ExperimentReport run_lipschitz(const SweepConfig& cfg, int threads) {
    CoefficientExpr expr = parse_coefficient(cfg.coefficient.expr);
    std::vector<MultiscaleCoefficient> instances;
    for (auto& scales : family_scales(cfg))
        instances.push_back(make_coefficient(expr, scales, cfg.dim, cfg.coefficient.lambda,
                                             {cfg.coefficient.tau, cfg.coefficient.L}));

    ExperimentReport rep;
    rep.name = cfg.name;
    rep.kind = "lipschitz";
    rep.seed = cfg.seed;
    rep.version = kVersion;
    rep.config_hash = config_hash(cfg);
    rep.records.resize(instances.size());

    ScalarFn F = make_forcing_scalar(cfg.F);
    std::ostringstream csv;
    csv << "idx,eps_n,r,Mr\n";
    std::vector<std::string> csv_chunks(instances.size());

    parallel_for(instances.size(), threads, [&](std::size_t k) {
        InstanceRecord& rec = rep.records[k];
        rec.index = static_cast<int>(k);
        const MultiscaleCoefficient& coef = instances[k];
        rec.eps = coef.scales;
        try {
            const int n = coef.n_scales();
            double eps_n = coef.scales.back();
            int N = static_cast<int>(std::ceil(cfg.grid_factor / eps_n));
            if (static_cast<long>(N) + 1 > cfg.max_nodes)
                throw UnresolvedScale("grid budget exceeded; instance skipped");
            double h = 1.0 / N;
            rec.h = h;

            double rmin, rmax, q_used = 1.0;
            if (cfg.lip.delta_index >= 1) {
                // mesoscopic window near delta = eps_j (three or more scales)
                if (cfg.lip.delta_index > n) throw InvalidInput("delta_index exceeds n");
                double delta = coef.scales[cfg.lip.delta_index - 1];
                double Q = std::pow(delta, -cfg.lip.alpha);
                if (!(Q > 1.0)) throw InvalidInput("delta^(-alpha) must exceed 1");
                // ratios above 1 enter through their fractional part: integer
                // shifts move p_i by a multiple of q and leave gamma_i alone
                std::vector<double> alphas;
                for (int i = 0; i < n; ++i)
                    if (i != cfg.lip.delta_index - 1)
                        alphas.push_back(frac(delta / coef.scales[i]));
                RationalApproximation ap = simultaneous_approx(alphas, Q);
                q_used = static_cast<double>(ap.q);
                rmin = q_used * delta;
                rmax = std::min(q_used * std::pow(delta, 1.0 - cfg.lip.alpha), 1.0);
                if (rmin >= rmax)
                    throw WindowEmpty("q*delta >= min(q*delta^(1-alpha), 1)");
            } else {
                rmin = std::pow(coef.scales[n - 1], 1.0 - cfg.lip.alpha);
                rmax = 1.0;
            }

            SolveOptions sopt;
            GridField u = solve_dirichlet(coef, F, {}, h, sopt);
            GridField gu = gradient(u);

            Vec center{0.5};
            center.n = cfg.dim;
            if (cfg.dim == 2) center[1] = 0.5;
            double ref_profile = average_Mt_at(gu, rmax, center);
            double ref_force = sample_lp_norm_fn([&](const Vec& x) { return std::abs(F(x)); },
                                                 cfg.dim, cfg.lip.p, std::min(N, 4096));
            double ref = ref_profile + ref_force;

            std::ostringstream rows;
            double Kmax = 0.0;
            for (int j = 0; j < cfg.lip.ladder; ++j) {
                double t = cfg.lip.ladder == 1
                               ? 0.0
                               : static_cast<double>(j) / (cfg.lip.ladder - 1);
                double rr = rmin * std::pow(rmax / rmin, t);
                double val = average_Mt_at(gu, rr, center);
                Kmax = std::max(Kmax, val / ref);
                rows << rec.index << "," << format_double(eps_n) << "," << format_double(rr)
                     << "," << format_double(val) << "\n";
            }
            csv_chunks[k] = rows.str();
            rec.values.push_back({"K", Kmax});
            rec.values.push_back({"q", q_used});
            rec.values.push_back({"r_max", rmax});
            rec.values.push_back({"r_min", rmin});
            rec.values.push_back({"ref", ref});
            std::sort(rec.values.begin(), rec.values.end());
        } catch (const std::exception& e) {
            rec.error = e.what();  // isolation: the sweep keeps going
        }
    });

    // verdict: profile constant recorded and stable across the family
    std::vector<double> ks;
    for (const auto& r : rep.records) {
        if (!r.error.empty()) continue;
        for (const auto& [k, v] : r.values)
            if (k == "K") ks.push_back(v);
    }
    bool pass = ks.size() == rep.records.size() && !ks.empty();
    if (!ks.empty()) {
        std::vector<double> sorted = ks;
        std::sort(sorted.begin(), sorted.end());
        double med = sorted[sorted.size() / 2];
        double worst = 0.0;
        for (double k : ks) worst = std::max(worst, std::abs(k - med) / med);
        rep.aggregates.push_back({"K_median", med});
        rep.aggregates.push_back({"K_rel_spread", worst});
        pass = pass && worst <= 0.20;
        std::ostringstream txt;
        txt << "K median=" << format_double(med) << " max rel dev=" << format_double(worst)
            << (pass ? " OK" : " FAIL");
        rep.verdict = txt.str();
    } else {
        rep.verdict = "no successful instances";
    }
    rep.pass = pass;
    for (const auto& chunk : csv_chunks) csv << chunk;
    rep.csv_name = "profile.csv";
    rep.csv = csv.str();
    return rep;
}

std::string report_to_json(const ExperimentReport& rep, bool with_timestamp) {
    json root;
    root["name"] = rep.name;
    root["kind"] = rep.kind;
    root["version"] = rep.version;
    root["config_hash"] = rep.config_hash;
    root["seed"] = rep.seed;
    if (with_timestamp) {
        auto now = std::chrono::system_clock::now();
        root["generated_unix"] =
            std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    }
    root["pass"] = rep.pass;
    root["verdict"] = rep.verdict;
    json aggs = json::object();
    for (const auto& [k, v] : rep.aggregates) aggs[k] = v;
    root["aggregates"] = aggs;
    json records = json::array();
    for (const auto& r : rep.records) {
        json jr;
        jr["index"] = r.index;
        jr["config_hash"] = rep.config_hash;
        jr["eps"] = r.eps;
        jr["h"] = r.h;
        json vals = json::object();
        for (const auto& [k, v] : r.values) vals[k] = v;
        jr["values"] = vals;
        jr["error"] = r.error;
        records.push_back(jr);
    }
    root["records"] = records;
    return root.dump(2);
}

void emit_report(const ExperimentReport& rep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream os(fs::path(out_dir) / "report.json");
        if (!os) throw IoError("cannot write report.json in '" + out_dir + "'");
        os << report_to_json(rep) << "\n";
    }
    {
        std::ofstream os(fs::path(out_dir) / rep.csv_name, std::ios::binary);
        if (!os) throw IoError("cannot write " + rep.csv_name + " in '" + out_dir + "'");
        os << rep.csv;
    }
}

}  // namespace msh
