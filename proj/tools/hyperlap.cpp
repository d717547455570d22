#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperlap/closed_forms.hpp"
#include "hyperlap/exponents.hpp"
#include "hyperlap/identities.hpp"
#include "hyperlap/io.hpp"
#include "hyperlap/pohozaev.hpp"
#include "hyperlap/radial_ode.hpp"
#include "hyperlap/shooting.hpp"
#include "hyperlap/variational.hpp"

namespace fs = std::filesystem;
using namespace hyperlap;
using io::Json;
using io::num;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::optional<int> n;
    std::optional<double> p, q, lambda;
    std::optional<double> tmax, tol, alpha, T;
    std::optional<std::size_t> grid;
    std::string alphas = "1e-4:1e4:200";
    std::uint64_t seed = kDefaultSeed;
    std::string in;
    std::string out;
    unsigned threads = 0;
    std::string suite;
};

std::string default_out()
{
    const char* env = std::getenv("HYPERLAP_OUT");
    return env && *env ? env : "hyperlap_out";
}

int need_n(const Flags& f)
{
    if (!f.n)
        throw UsageError("--n is required");
    return *f.n;
}

double need(const std::optional<double>& v, const char* name)
{
    if (!v)
        throw UsageError(std::string(name) + " is required");
    return *v;
}

ProblemParams full_params(const Flags& f)
{
    return ProblemParams::make(need_n(f), need(f.p, "--p"), need(f.q, "--q"), need(f.lambda, "--lambda"));
}

std::string slug(const ProblemParams& P)
{
    std::string s = "n" + std::to_string(P.n) + "_p" + io::fmt(P.p) + "_q" + io::fmt(P.q) + "_l" + io::fmt(P.lambda);
    std::replace(s.begin(), s.end(), '.', 'd');
    return s;
}

OdeConfig ode_config(const ProblemParams& P, const Flags& f)
{
    OdeConfig c = default_ode_config(P);
    if (f.tmax) {
        if (!(*f.tmax > c.t_start))
            throw UsageError("--tmax must exceed the start radius");
        c.t_max = *f.tmax;
    }
    if (f.tol) {
        if (!(*f.tol > 0.0))
            throw UsageError("--tol must be positive");
        c.rel_tol = c.abs_tol = *f.tol;
    }
    return c;
}

Json ode_json(const OdeConfig& c)
{
    return Json{{"t_max", num(c.t_max)}, {"rel_tol", num(c.rel_tol)}, {"abs_tol", num(c.abs_tol)}};
}

std::vector<double> parse_alphas(const std::string& spec)
{
    auto parts = io::split(spec, ':');
    try {
        if (parts.size() == 3)
            return log_grid(std::stod(parts[0]), std::stod(parts[1]), std::stoul(parts[2]));
        std::vector<double> out;
        for (const auto& s : io::split(spec, ','))
            out.push_back(std::stod(s));
        if (out.empty())
            throw UsageError("empty --alphas");
        return out;
    } catch (const std::invalid_argument&) {
        throw UsageError("--alphas must be lo:hi:count or a comma-separated list");
    }
}

int cmd_roots(const Flags& f)
{
    const int n = need_n(f);
    const double p = need(f.p, "--p");
    const double lam = f.lambda.value_or(0.0);
    const DecayRoots r = decay_roots(n, p, lam);
    std::cout << "lambda_max " << io::fmt(lambda_max(n, p)) << "\n"
              << "p_star " << io::fmt(critical_exponent(n, p)) << "\n"
              << "beta " << io::fmt(r.beta) << "\n"
              << "alpha " << io::fmt(r.alpha) << "\n";
    return kPass;
}

int cmd_trajectory(const Flags& f, const ProblemParams& P, const OdeConfig& cfg)
{
    const double a = *f.alpha;
    TrajectoryReport tr = classify(a, P, cfg);
    Json inputs{{"params", io::params_json(P)}, {"alpha", num(a)}, {"ode", ode_json(cfg)}};
    Json j = io::provenance("shoot", inputs);
    j["classification"] = to_string(tr.classification);
    j["event"] = to_string(tr.event);
    j["cross_time"] = tr.cross_time ? num(*tr.cross_time) : Json(nullptr);
    j["logderiv_tail"] = num(tr.logderiv_tail);
    if (P.lambda == 0.0 && P.is_critical()) {
        Json pz = Json::array();
        for (double R : {2.0, 5.0, 10.0, 15.0})
            if (tr.profile.t.back() >= R)
                pz.push_back(io::pohozaev_json(pohozaev_residuals(tr.profile, R)));
        j["pohozaev"] = pz;
    }
    j["passed"] = true;
    const fs::path out(f.out);
    io::write_profile_csv(out / "trajectory.csv", tr.profile);
    io::write_json(out / "trajectory.json", j);
    std::cout << "alpha " << io::fmt(a) << " " << to_string(tr.classification) << " logderiv_tail "
              << io::fmt(tr.logderiv_tail) << "\n";
    return kPass;
}

int cmd_shoot(const Flags& f)
{
    const ProblemParams P = full_params(f);
    const OdeConfig cfg = ode_config(P, f);
    if (f.alpha)
        return cmd_trajectory(f, P, cfg);
    Json inputs{{"params", io::params_json(P)}, {"ode", ode_json(cfg)}};
    Json j = io::provenance("shoot", inputs);
    const fs::path out(f.out);
    const double a_lam = decay_roots(P).alpha;
    try {
        GroundState gs = find_ground_state(P, cfg);
        const bool ok = std::abs(gs.logderiv_tail - a_lam) <= 1e-3;
        j["alpha_star"] = num(gs.alpha_star);
        j["classification"] = to_string(gs.classification);
        j["decay_rate"] = num(gs.decay_rate);
        j["logderiv_tail"] = num(gs.logderiv_tail);
        j["alpha_lambda"] = num(a_lam);
        j["c_low"] = num(gs.c_low);
        j["c_high"] = num(gs.c_high);
        j["sobolev_estimate"] = num(gs.sobolev_estimate);
        j["bracket"] = Json::array({num(gs.bracket_lo), num(gs.bracket_hi)});
        j["bisection_steps"] = gs.history.size();
        j["match_time"] = num(gs.match_time);
        j["residual_max_abs"] = num(gs.residual.max_abs);
        j["residual_scale"] = num(gs.residual_scale);
        j["passed"] = ok;
        io::write_profile_csv(out / "shoot_profile.csv", gs.profile);
        io::write_json(out / "shoot.json", j);
        std::cout << "alpha_star " << io::fmt(gs.alpha_star) << "\n"
                  << "logderiv_tail " << io::fmt(gs.logderiv_tail) << "\n"
                  << "alpha_lambda " << io::fmt(a_lam) << "\n"
                  << "sobolev_estimate " << io::fmt(gs.sobolev_estimate) << "\n";
        return ok ? kPass : kFail;
    } catch (const BracketingError& e) {
        Json m = Json::array();
        for (const auto& [a, c] : e.map)
            m.push_back(Json{{"alpha", num(a)}, {"classification", to_string(c)}});
        j["error"] = e.what();
        j["classification_map"] = m;
    } catch (const GroundStateRejected& e) {
        j["error"] = e.what();
    }
    j["passed"] = false;
    io::write_json(out / "shoot.json", j);
    std::cerr << "shoot: " << j["error"].get<std::string>() << "\n";
    return kFail;
}

int cmd_scan(const Flags& f)
{
    const int n = need_n(f);
    const double p = need(f.p, "--p");
    const double q = f.q.value_or(critical_exponent(n, p));
    const double lam = f.lambda.value_or(0.0);
    const ProblemParams P = ProblemParams::make(n, p, q, lam);
    const bool critical = P.lambda == 0.0 && P.is_critical();
    const OdeConfig cfg = ode_config(P, f);
    const std::vector<double> alphas = parse_alphas(f.alphas);
    ScanOptions so;
    so.threads = f.threads;
    so.require_critical = false;
    ScanReport rep = nonexistence_scan(P, alphas, cfg, so);

    Json inputs{{"params", io::params_json(P)}, {"alphas", f.alphas}, {"ode", ode_json(cfg)}};
    Json j = io::provenance("scan-critical", inputs);
    j["mode"] = critical ? "nonexistence" : "control";
    j["points"] = rep.rows.size();
    j["crossings"] = rep.crossings;
    j["fast_hits"] = rep.fast_hits;
    Json refs = Json::array();
    for (const auto& r : rep.refinements)
        refs.push_back(Json{{"lo", num(r.lo)},
                            {"hi", num(r.hi)},
                            {"outcome", to_string(r.outcome)},
                            {"alpha_star", r.alpha_star ? num(*r.alpha_star) : Json(nullptr)},
                            {"note", r.note}});
    j["refinements"] = refs;
    const bool ok = critical ? rep.fast_hits == 0 : true;
    j["passed"] = ok;
    const fs::path out(f.out);
    io::write_text(out / "scan.csv", io::scan_csv(rep));
    io::write_json(out / "scan.json", j);
    std::cout << (critical ? "nonexistence" : "control") << " scan: " << rep.rows.size() << " heights, "
              << rep.crossings << " crossings, " << rep.fast_hits << " fast hits\n";
    return ok ? kPass : kFail;
}

int cmd_minimize(const Flags& f)
{
    const ProblemParams P = full_params(f);
    if (P.is_critical())
        throw UsageError("minimize refuses q = p*: minimizing sequences concentrate at a point (loss of compactness); "
                         "use a subcritical q");
    MinimizeOptions opt;
    if (f.T)
        opt.T = *f.T;
    if (f.grid)
        opt.points = *f.grid;
    MinimizeResult r = minimize_quotient(P, opt);
    Json inputs{{"params", io::params_json(P)}, {"T", num(opt.T)}, {"grid", opt.points},
                {"grad_tol", num(opt.grad_tol)}, {"max_iter", opt.max_iter}};
    Json j = io::provenance("minimize", inputs);
    j["params"] = io::params_json(P);
    j["S_estimate"] = num(r.S_estimate);
    j["iterations"] = r.iterations;
    j["grid"] = Json{{"T", num(opt.T)}, {"points", opt.points}};
    j["converged"] = r.converged;
    j["first_order_residual"] = num(r.first_order_residual);
    j["passed"] = r.converged;
    std::string csv = "t,u\n";
    for (std::size_t i = 0; i < r.minimizer.t.size(); ++i)
        csv += io::fmt(r.minimizer.t[i]) + "," + io::fmt(r.minimizer.u[i]) + "\n";
    const fs::path out(f.out);
    io::write_text(out / "minimizer.csv", csv);
    io::write_json(out / "minimize.json", j);
    std::cout << "S_estimate " << io::fmt(r.S_estimate) << "\n"
              << "iterations " << r.iterations << "\n";
    return r.converged ? kPass : kFail;
}

unsigned section_mask(const std::string& s)
{
    if (s == "geometry")
        return kGeometry;
    if (s == "subsuper")
        return kSubSuper;
    if (s == "eigen")
        return kEigen;
    if (s == "picone")
        return kPicone;
    if (s == "hardy")
        return kHardy;
    if (s == "pohozaev")
        return kPohozaev;
    return kAllSections;
}

// Per-radius barrier residual CSVs.
void write_subsuper_csvs(const std::vector<ProblemParams>& bench, const fs::path& out)
{
    for (const auto& P : bench) {
        std::vector<BarrierSpec> specs = {BarrierSpec::supersolution(P, 2), BarrierSpec::supersolution(P, 4),
                                          BarrierSpec::subsolution(P),
                                          BarrierSpec::weak_envelope(P, 0.1 * (P.lambda_max() - P.lambda))};
        for (const auto& s : specs) {
            std::vector<double> g = geometric_grid(1e-2, 100.0, 400.0);
            std::vector<double> r;
            std::vector<bool> ok;
            for (double t : g) {
                r.push_back(barrier_residual(s, t));
                ok.push_back(claimed_sign_ok(s, t));
            }
            std::string name = "subsuper_" + slug(P) + "_" + to_string(s.kind);
            if (s.kind == BarrierKind::supersolution)
                name += "_m" + std::to_string(s.m);
            io::write_text(out / (name + ".csv"), io::residual_csv(ResidualReport::from(g, r), ok));
        }
    }
}

int cmd_verify_pohozaev_file(const Flags& f)
{
    const int n = need_n(f);
    const double p = need(f.p, "--p");
    const ProblemParams P = ProblemParams::make(n, p, critical_exponent(n, p), 0.0);
    RadialProfile pr = io::read_profile_csv(f.in, P);
    Json inputs{{"params", io::params_json(P)}, {"in", fs::path(f.in).filename().string()},
                {"content_hash", io::hex(io::fnv1a(io::profile_csv(pr)))}};
    Json j = io::provenance("verify pohozaev", inputs);
    Json rows = Json::array();
    bool ok = true;
    const bool scale_check = contradiction_scale_applies(pr.u.front(), P);
    for (double R : {2.0, 5.0, 10.0, 15.0}) {
        if (pr.t.back() < R)
            continue;
        PohozaevReport r = pohozaev_residuals(pr, R);
        const bool pass = std::max(r.rel1(), r.rel2()) <= 1e-6 && contradiction_negative(r, scale_check);
        ok = ok && pass;
        Json row = io::pohozaev_json(r);
        row["passed"] = pass;
        rows.push_back(row);
        std::cout << (pass ? "PASS" : "FAIL") << "  R=" << io::fmt(r.R) << "  rel1=" << io::fmt(r.rel1())
                  << "  rel2=" << io::fmt(r.rel2()) << "  contradiction_term=" << io::fmt(r.contradiction_term)
                  << "\n";
    }
    if (rows.empty())
        throw UsageError("profile too short: needs t >= 2");
    j["pohozaev"] = rows;
    j["passed"] = ok;
    io::write_json(fs::path(f.out) / "verify_pohozaev_file.json", j);
    return ok ? kPass : kFail;
}

int cmd_verify(const Flags& f)
{
    if (f.suite == "pohozaev" && !f.in.empty())
        return cmd_verify_pohozaev_file(f);
    std::vector<ProblemParams> bench = default_benchmarks();
    if (f.n || f.p || f.q || f.lambda)
        bench = {full_params(f)};
    SuiteOptions opt;
    opt.seed = f.seed;
    opt.sections = section_mask(f.suite);
    opt.threads = f.threads;
    SuiteReport rep = identity_suite(bench, opt);

    Json bj = Json::array();
    for (const auto& P : bench)
        bj.push_back(io::params_json(P));
    Json inputs{{"suite", f.suite}, {"seed", f.seed}, {"benchmarks", bj}};
    Json j = io::provenance("verify", inputs);
    j["rows"] = io::suite_json(rep);
    j["failures"] = rep.failures();
    j["passed"] = rep.passed();
    const fs::path out(f.out);
    std::string text = io::table(io::suite_cells(j["rows"]));
    io::write_json(out / ("verify_" + f.suite + ".json"), j);
    io::write_text(out / ("verify_" + f.suite + ".txt"), text);
    if (f.suite == "subsuper" || f.suite == "all")
        write_subsuper_csvs(bench, out);
    std::cout << text << rep.rows.size() << " checks, " << rep.failures() << " failures\n";
    return rep.passed() ? kPass : kFail;
}

int cmd_report(const Flags& f)
{
    if (f.in.empty())
        throw UsageError("report needs --in <dir>");
    const fs::path dir(f.in);
    if (!fs::is_directory(dir))
        throw UsageError(f.in + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::vector<std::string>> cells;
    bool ok = true;
    for (const auto& file : files) {
        Json j = io::read_json(file);
        const std::string name = file.filename().string();
        const bool passed = j.value("passed", false);
        ok = ok && passed;
        if (j.contains("rows")) {
            for (auto& row : io::suite_cells(j["rows"])) {
                row.insert(row.begin() + 1, name);
                cells.push_back(std::move(row));
            }
        } else {
            cells.push_back({passed ? "PASS" : "FAIL", name, j.value("command", std::string("?")), "", "", "", "",
                             j.value("error", std::string())});
        }
    }
    const std::string text = io::table(cells);
    io::write_text(dir / "report.txt", text);
    std::cout << text << files.size() << " reports merged\n";
    return ok ? kPass : kFail;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hyperlap: ground states, barriers and identities for the hyperbolic p-Laplacian"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; command-line flags win");
    Flags f;
    f.out = default_out();
    app.add_option("--n", f.n, "dimension");
    app.add_option("--p", f.p, "p-Laplacian exponent");
    app.add_option("--q", f.q, "nonlinearity exponent");
    app.add_option("--lambda", f.lambda, "eigenvalue parameter");
    app.add_option("--tmax", f.tmax, "integration radius");
    app.add_option("--tol", f.tol, "integrator tolerance");
    app.add_option("--alpha", f.alpha, "single trajectory height (shoot)");
    app.add_option("--alphas", f.alphas, "scan heights: lo:hi:count or a comma list");
    app.add_option("--grid", f.grid, "minimizer grid points");
    app.add_option("--T", f.T, "minimizer truncation radius");
    app.add_option("--seed", f.seed, "Monte Carlo seed");
    app.add_option("--in", f.in, "input file or directory");
    app.add_option("--out", f.out, "output directory (default $HYPERLAP_OUT or hyperlap_out)");
    app.add_option("--threads", f.threads, "worker threads, 0 = hardware");

    auto* roots = app.add_subcommand("roots", "decay roots and critical data")->fallthrough();
    auto* shoot = app.add_subcommand("shoot", "ground state by shooting")->fallthrough();
    auto* scan = app.add_subcommand("scan-critical", "nonexistence scan at q = p*, lambda = 0")->fallthrough();
    auto* mini = app.add_subcommand("minimize", "variational minimizer")->fallthrough();
    auto* verify = app.add_subcommand("verify", "run a verification suite")->fallthrough();
    verify->add_option("suite", f.suite, "geometry|subsuper|eigen|picone|hardy|pohozaev|all")
        ->required()
        ->check(CLI::IsMember({"geometry", "subsuper", "eigen", "picone", "hardy", "pohozaev", "all"}));
    auto* report = app.add_subcommand("report", "merge JSON reports into one table")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*roots)
            return cmd_roots(f);
        if (*shoot)
            return cmd_shoot(f);
        if (*scan)
            return cmd_scan(f);
        if (*mini)
            return cmd_minimize(f);
        if (*verify)
            return cmd_verify(f);
        if (*report)
            return cmd_report(f);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kUsage;
    } catch (const GridError& e) {
        std::cerr << "invalid grid: " << e.what() << "\n";
        return kUsage;
    } catch (const io::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}
