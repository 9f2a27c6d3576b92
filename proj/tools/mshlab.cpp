// mshlab: multiscale homogenization laboratory CLI.
//
// Subcommands: approx, reperiodize, cell, solve, reduce, rate, sweep-cz,
// sweep-lip, sweep-qp. Sweeps exit nonzero when a verdict fails.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "msh/cell.hpp"
#include "msh/coefficient.hpp"
#include "msh/diophantine.hpp"
#include "msh/elliptic.hpp"
#include "msh/grid.hpp"
#include "msh/harness.hpp"
#include "msh/operators.hpp"
#include "msh/parallel.hpp"
#include "msh/reduction.hpp"

namespace {

using json = nlohmann::ordered_json;

double parse_step(const std::string& s) {
    // accepts "0.001" or "1/256"
    auto slash = s.find('/');
    if (slash == std::string::npos) return std::stod(s);
    return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

struct CoefFile {
    msh::CoefficientExpr expr;
    std::vector<double> scales;
    int dim = 1;
    double lambda = 0.25;
    double tau = 1.0;
    double L = 50.0;
};

CoefFile load_coef(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw msh::IoError("cannot open coefficient file '" + path + "'");
    json j = json::parse(is);
    CoefFile c{msh::parse_coefficient(j.at("expr").get<std::string>()),
               j.at("scales").get<std::vector<double>>(),
               j.value("dim", 1),
               j.value("lambda", 0.25),
               j.value("tau", 1.0),
               j.value("L", 50.0)};
    return c;
}

msh::MultiscaleCoefficient to_coefficient(const CoefFile& c) {
    return msh::make_coefficient(c.expr, c.scales, c.dim, c.lambda, {c.tau, c.L});
}

json approx_to_json(const msh::RationalApproximation& ap) {
    json out;
    out["q"] = ap.q;
    out["p"] = ap.p;
    out["gamma"] = ap.gamma;
    out["s"] = ap.s;
    out["Q"] = ap.Q;
    return out;
}

int run_sweep(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
              bool seed_set, int threads, const std::string& kind) {
    msh::SweepConfig cfg = msh::parse_config(config_path);
    if (seed_set) cfg.seed = seed;
    cfg.kind = kind;
    msh::ExperimentReport rep;
    if (kind == "cz")
        rep = msh::run_cz_sweep(cfg, threads);
    else if (kind == "lipschitz")
        rep = msh::run_lipschitz(cfg, threads);
    else
        rep = msh::run_quasiperiodic(cfg, threads);
    if (!out_dir.empty()) msh::emit_report(rep, out_dir);
    std::cout << (rep.pass ? "PASS" : "FAIL") << ": " << rep.verdict << "\n";
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiscale homogenization laboratory"};
    app.require_subcommand(1);
    // the grid-step option is spelled --h, so help lives on --help only
    app.set_help_flag("--help", "print help");

    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = msh::hardware_threads();
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    bool seed_set = false;
    app.add_option("--seed", seed, "RNG seed recorded in reports")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_option("--threads", threads, "worker threads")->capture_default_str();

    auto add_sub = [&app](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->set_help_flag("--help", "print help");
        sub->fallthrough();  // allow global flags after the subcommand
        return sub;
    };

    // approx
    auto* capprox = add_sub("approx", "simultaneous rational approximation");
    std::string alphas_str;
    double Q = 10.0;
    std::int64_t cap = msh::kDefaultDenominatorCap;
    capprox->add_option("--alphas", alphas_str, "comma-separated reals in [0,1]")->required();
    capprox->add_option("--Q", Q, "separation target > 1")->required();
    capprox->add_option("--cap", cap, "denominator search cap");

    // reperiodize
    auto* crep = add_sub("reperiodize", "rewrite a coefficient with separated scales");
    std::string coef_path;
    double rep_Q = 30.0;
    int rep_points = 1000;
    crep->add_option("--coef", coef_path, "coefficient JSON file")->required();
    crep->add_option("--Q", rep_Q, "separation target")->required();
    crep->add_option("--points", rep_points, "identity check sample count");

    // cell
    auto* ccell = add_sub("cell", "solve the periodic cell problem");
    std::string cell_coef, cell_h = "1/256";
    ccell->add_option("--coef", cell_coef, "coefficient JSON file")->required();
    ccell->add_option("--h", cell_h, "grid spacing (e.g. 1/256)");

    // solve
    auto* csolve = add_sub("solve", "Dirichlet solve on the unit domain");
    std::string solve_coef, solve_F, solve_f, solve_h = "1/1024";
    bool solve_override = false;
    csolve->add_option("--coef", solve_coef, "coefficient JSON file")->required();
    csolve->add_option("--F", solve_F, "bulk forcing expression in x");
    csolve->add_option("--f", solve_f, "divergence forcing expression in x");
    csolve->add_option("--h", solve_h, "grid spacing");
    csolve->add_flag("--allow-unresolved", solve_override, "skip the h <= eps_n/8 guard");

    // reduce
    auto* creduce = add_sub("reduce", "one-scale reduction report");
    std::string red_coef;
    double red_Q = 30.0, red_r = 0.25;
    std::string red_h;
    creduce->add_option("--coef", red_coef, "coefficient JSON file")->required();
    creduce->add_option("--Q", red_Q, "separation target")->required();
    creduce->add_option("--r", red_r, "error ball radius");
    creduce->add_option("--h", red_h, "grid spacing override");

    // rate
    auto* crate = add_sub("rate", "locally periodic convergence-rate study");
    std::string rate_config;
    crate->add_option("--config", rate_config, "rate config JSON")->required();

    // sweeps
    std::string cz_config, lip_config, qp_config;
    auto* ccz = add_sub("sweep-cz", "uniform CZ-bound sweep");
    ccz->add_option("--config", cz_config, "sweep config JSON")->required();
    auto* clip = add_sub("sweep-lip", "large-scale Lipschitz profile sweep");
    clip->add_option("--config", lip_config, "sweep config JSON")->required();
    auto* cqp = add_sub("sweep-qp", "quasiperiodic CZ sweep");
    cqp->add_option("--config", qp_config, "sweep config JSON")->required();


    CLI11_PARSE(app, argc, argv);

    try {
        if (capprox->parsed()) {
            auto alphas = parse_list(alphas_str);
            auto ap = msh::simultaneous_approx(alphas, Q, cap);
            auto cert = msh::verify_approx(ap, alphas, Q);
            json out = approx_to_json(ap);
            out["certificate"] = {{"ok", cert.ok},
                                  {"worst_scaled_residual", cert.worst_scaled_residual}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (crep->parsed()) {
            CoefFile cf = load_coef(coef_path);
            auto coef = to_coefficient(cf);
            auto res = msh::reperiodize(coef, rep_Q);
            double worst = 0.0;
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            for (int k = 0; k < rep_points; ++k) {
                msh::Vec x(cf.dim);
                for (int c = 0; c < cf.dim; ++c) x[c] = u(rng);
                double ref = coef.eval(x).max_abs();
                double diff = (coef.eval(x) - res.sharp.eval(x)).max_abs();
                worst = std::max(worst, diff / (1.0 + ref));
            }
            json out;
            out["new_scales"] = res.new_scales;
            out["approx"] = approx_to_json(res.approx);
            out["dropped"] = res.dropped;
            out["identity_residual"] = worst;
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (ccell->parsed()) {
            CoefFile cf = load_coef(cell_coef);
            auto coef = to_coefficient(cf);
            double h = parse_step(cell_h);
            json out;
            if (cf.dim == 1) {
                auto a = [&](double y) {
                    std::array<msh::Vec, 1> args{msh::Vec{y}};
                    return coef.kernel(std::span<const msh::Vec>(args.data(), 1))(0, 0);
                };
                if (coef.n_scales() != 1)
                    throw msh::InvalidInput("cell expects a one-scale kernel; reperiodize first");
                auto [cfld, em] = msh::solve_cell_1d(a, static_cast<int>(std::lround(1.0 / h)));
                out["a_hat"] = em.value(0, 0);
                out["mean_residual"] = cfld.mean_residual;
                out["energy"] = cfld.energy;
                if (!out_dir.empty()) {
                    msh::GridField g =
                        msh::GridField::scalar(1, 0.0, 0.0, cfld.h, cfld.ncell, 1);
                    g.values = cfld.values[0];
                    std::filesystem::create_directories(out_dir);
                    msh::write_grid(out_dir + "/corrector.bin", g, {}, coef.n_scales());
                    out["corrector_file"] = out_dir + "/corrector.bin";
                }
            } else {
                if (coef.n_scales() != 1)
                    throw msh::InvalidInput("cell expects a one-scale kernel; reperiodize first");
                auto A = [&](double y1, double y2) {
                    std::array<msh::Vec, 1> args{msh::Vec{y1, y2}};
                    return coef.kernel(std::span<const msh::Vec>(args.data(), 1));
                };
                auto [cfld, em] = msh::solve_cell_2d(A, h);
                out["a_hat"] = {{em.value(0, 0), em.value(0, 1)},
                                {em.value(1, 0), em.value(1, 1)}};
                out["mean_residual"] = cfld.mean_residual;
                out["energy"] = cfld.energy;
                out["iterations"] = em.iterations;
                if (!out_dir.empty()) {
                    // chi_1, chi_2 interleaved as a vector field on the cell
                    msh::GridField g =
                        msh::GridField::vector(2, 0.0, 0.0, cfld.h, cfld.ncell, cfld.ncell);
                    for (int k = 0; k < cfld.ncell * cfld.ncell; ++k) {
                        g.values[2 * k] = cfld.values[0][k];
                        g.values[2 * k + 1] = cfld.values[1][k];
                    }
                    std::filesystem::create_directories(out_dir);
                    msh::write_grid(out_dir + "/corrector.bin", g, {}, coef.n_scales());
                    out["corrector_file"] = out_dir + "/corrector.bin";
                }
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (csolve->parsed()) {
            CoefFile cf = load_coef(solve_coef);
            auto coef = to_coefficient(cf);
            double h = parse_step(solve_h);
            msh::ScalarFn F;
            msh::VectorFn f;
            if (!solve_F.empty()) {
                auto e = std::make_shared<msh::ScalarExpr>(msh::parse_scalar(solve_F));
                F = [e](const msh::Vec& x) {
                    msh::EvalContext ctx{{}, &x, {}};
                    return e->eval(ctx);
                };
            }
            if (!solve_f.empty()) {
                auto e = std::make_shared<msh::ScalarExpr>(msh::parse_scalar(solve_f));
                int dim = cf.dim;
                f = [e, dim](const msh::Vec& x) {
                    msh::EvalContext ctx{{}, &x, {}};
                    msh::Vec v(dim);
                    v[0] = e->eval(ctx);
                    return v;
                };
            }
            msh::SolveOptions opt;
            opt.allow_unresolved = solve_override;
            msh::SolveStats stats;
            msh::GridField u = msh::solve_dirichlet(coef, F, f, h, opt, &stats);
            json out;
            out["h"] = h;
            out["iterations"] = stats.iterations;
            out["residual"] = stats.residual;
            out["grad_l2"] = stats.grad_l2;
            out["energy_bound"] = stats.energy_bound;
            out["u_l2"] = msh::lp_norm(u, 2.0);
            if (!out_dir.empty()) {
                msh::write_grid(out_dir + "/u.bin", u, {}, coef.n_scales());
                out["field_file"] = out_dir + "/u.bin";
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (creduce->parsed()) {
            CoefFile cf = load_coef(red_coef);
            auto coef = to_coefficient(cf);
            msh::ReductionOptions opt;
            opt.threads = threads;
            if (!red_h.empty()) opt.h = parse_step(red_h);
            auto res = msh::reduce_one_scale(
                coef, [](const msh::Vec&) { return 1.0; }, red_r, red_Q, opt);
            const auto& r = res.report;
            json out;
            out["Q"] = r.Q;
            out["q"] = r.q;
            out["new_scales"] = r.new_scales;
            out["h"] = r.h;
            out["r"] = r.r;
            out["r_solve"] = r.r_solve;
            out["slow_lattice"] = r.slow_lattice;
            out["norm_grad_ue"] = r.norm_grad_ue;
            out["norm_grad_ue_2r"] = r.norm_grad_ue_2r;
            out["norm_grad_uflat"] = r.norm_grad_uflat;
            out["norm_F_2r"] = r.norm_F_2r;
            out["error"] = r.error;
            out["energy_constant"] = r.energy_constant;
            out["bound_proxy"] = r.bound_proxy;
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (crate->parsed()) {
            std::ifstream is(rate_config);
            if (!is) throw msh::IoError("cannot open '" + rate_config + "'");
            json j = json::parse(is);
            std::string expr_text = j.at("expr").get<std::string>();
            auto eps = j.at("eps").get<std::vector<double>>();
            double lambda = j.value("lambda", 0.25);
            int factor = j.value("grid_factor", 64);
            msh::CoefficientExpr ce = msh::parse_coefficient(expr_text);
            auto a = [&ce](double x, double y) {
                msh::Vec xv{x};
                std::array<msh::Vec, 1> ys{msh::Vec{y}};
                msh::EvalContext ctx{std::span<const msh::Vec>(ys.data(), 1), &xv, {}};
                return ce.entries[0].eval(ctx);
            };
            auto table = msh::rate_locally_periodic(
                a, lambda, eps, [](const msh::Vec&) { return 1.0; }, factor);
            std::ostringstream csv;
            csv << "eps,h,l2_err,grad_err,layer,slope_l2,slope_grad\n";
            for (const auto& row : table.rows) {
                csv << msh::format_double(row.eps) << "," << msh::format_double(row.h) << ","
                    << msh::format_double(row.l2_err) << "," << msh::format_double(row.grad_err)
                    << "," << msh::format_double(row.layer) << ",";
                if (!table.flagged)
                    csv << msh::format_double(table.slope_l2) << ","
                        << msh::format_double(table.slope_grad);
                else
                    csv << ",";
                csv << "\n";
            }
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                std::ofstream os(out_dir + "/rates.csv", std::ios::binary);
                os << csv.str();
            } else {
                std::cout << csv.str();
            }
            json out;
            out["flagged"] = table.flagged;
            if (!table.flagged) {
                out["slope_l2"] = table.slope_l2;
                out["slope_grad"] = table.slope_grad;
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (ccz->parsed()) return run_sweep(cz_config, out_dir, seed, seed_set, threads, "cz");
        if (clip->parsed())
            return run_sweep(lip_config, out_dir, seed, seed_set, threads, "lipschitz");
        if (cqp->parsed())
            return run_sweep(qp_config, out_dir, seed, seed_set, threads, "quasiperiodic");
    } catch (const msh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
