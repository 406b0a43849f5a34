// fbh-cli: command-line front end. Exit codes: 0 success, 1 verification
// failure or uncertified computation, 2 invalid arguments.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbh/bergman.hpp"
#include "fbh/identity.hpp"
#include "fbh/metric.hpp"
#include "fbh/oracle.hpp"
#include "fbh/report.hpp"
#include "fbh/verify.hpp"

namespace {

using namespace fbh;

constexpr int kExitVerificationFailure = 1;
constexpr int kExitInvalidArguments = 2;

struct Options {
    int n = 1;
    int m = 1;
    double mu = 1.0;
    double nu = 0.0;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    int max_degree = 2000;
    double tail_tol = 1e-10;
    double samples = 1e5;
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string output;

    // command-specific
    std::vector<double> grid;
    std::vector<unsigned> p, q;
    bool oracle = false;
    bool at_origin = false;
    double z_norm_sq = 0.0;
    double w_tilde_sq = 0.0;
    std::string suite = "all";
};

void add_shared(CLI::App* cmd, Options& o)
{
    cmd->add_option("-n", o.n, "base dimension n")->capture_default_str();
    cmd->add_option("-m", o.m, "fibre dimension m")->capture_default_str();
    cmd->add_option("--mu", o.mu, "mu > 0")->capture_default_str();
    cmd->add_option("--nu", o.nu, "nu > -1")->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "weight alpha > 0");
    cmd->add_option("--max-degree", o.max_degree, "series degree budget")->capture_default_str();
    cmd->add_option("--tail-tol", o.tail_tol, "certified tail bound, relative")->capture_default_str();
    cmd->add_option("--samples", o.samples, "Monte Carlo samples")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd->add_option("--output", o.output, "write the report to this file instead of stdout");
}

DomainParams params_of(const Options& o) { return DomainParams(o.n, o.m, o.mu, o.nu); }

Weight weight_of(const Options& o)
{
    if (std::isnan(o.alpha)) throw std::invalid_argument("--alpha is required");
    return Weight(o.alpha);
}

TruncationPolicy policy_of(const Options& o)
{
    if (o.max_degree < 0) throw std::invalid_argument("--max-degree must be >= 0");
    TruncationPolicy t{o.max_degree, o.tail_tol};
    t.validate();
    return t;
}

std::uint64_t samples_of(const Options& o)
{
    if (!(o.samples >= 1.0) || o.samples > 1e15 || o.samples != std::floor(o.samples))
        throw std::invalid_argument("--samples must be a positive integer");
    return static_cast<std::uint64_t>(o.samples);
}

McConfig mc_of(const Options& o)
{
    McConfig c;
    c.samples = samples_of(o);
    c.seed = o.seed;
    c.batch = c.samples % 10000 == 0 ? 10000 : c.samples;
    c.validate();
    return c;
}

std::string join(const MultiIndex& idx)
{
    std::string s;
    for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? " " : "") + std::to_string(idx.exponents[i]);
    return s;
}

/// Point with z = (sqrt(z_norm_sq), 0, ...) and w~ = (sqrt(w_tilde_sq), 0, ...).
DomainPoint point_of(const DomainParams& p, const Options& o)
{
    const double zs = o.at_origin ? 0.0 : o.z_norm_sq;
    const double ws = o.at_origin ? 0.0 : o.w_tilde_sq;
    if (!(zs >= 0.0) || !(ws >= 0.0)) throw std::invalid_argument("squared norms must be >= 0");
    CVector z = CVector::Zero(p.n());
    CVector w = CVector::Zero(p.m());
    z(0) = std::sqrt(zs);
    w(0) = std::sqrt(ws) * std::exp(-0.5 * p.mu() * zs);
    return DomainPoint(p, z, w);
}

report::Table check_balanced(const Options& o)
{
    const DomainParams p = params_of(o);
    const Weight w = weight_of(o);
    const BalanceVerdict v = balance_verdict(p.n(), p.m(), snap_rational(p.nu()), w.alpha());
    report::Table t({"n", "m", "mu", "nu", "alpha", "balanced", "alpha_condition", "n_condition",
                     "nu_condition", "identity", "epsilon", "nu_exact"});
    report::Cell eps = std::monostate{};
    if (v.balanced()) eps = kernel_prefactor(p, w);
    report::Cell nu_exact = std::monostate{};
    if (v.nu_exact) nu_exact = v.nu_exact->str();
    t.add_row({std::int64_t{p.n()}, std::int64_t{p.m()}, p.mu(), p.nu(), w.alpha(), v.balanced(),
               v.alpha_condition, v.n_condition, v.nu_condition, v.identity, eps, nu_exact});
    return t;
}

report::Table epsilon_grid(const Options& o)
{
    const DomainParams p = params_of(o);
    const Weight w = weight_of(o);
    const TruncationPolicy policy = policy_of(o);
    if (o.grid.empty()) throw std::invalid_argument("--grid needs at least one value");
    report::Table t({"w_tilde_sq", "epsilon", "degree", "tail_bound"});
    for (double x : o.grid) {
        const SeriesResult r = epsilon_at(p, w, x, policy);
        t.add_row({x, r.value, std::int64_t{r.degree}, r.tail_bound});
    }
    return t;
}

report::Table norm(const Options& o)
{
    const DomainParams p = params_of(o);
    const Weight w = weight_of(o);
    const MultiIndex pi = o.p.empty() ? MultiIndex::zeros(p.n()) : MultiIndex(o.p);
    const MultiIndex qi = o.q.empty() ? MultiIndex::zeros(p.m()) : MultiIndex(o.q);
    const double exact = monomial_norm_sq(p, w, pi, qi);
    if (!o.oracle) {
        report::Table t({"p", "q", "norm_sq"});
        t.add_row({join(pi), join(qi), exact});
        return t;
    }
    const McEstimate e = monomial_norm_mc(p, w, pi, qi, mc_of(o));
    report::Table t({"p", "q", "norm_sq", "mc_mean", "mc_std_error", "mc_samples", "z_score"});
    t.add_row({join(pi), join(qi), exact, e.mean, e.std_error, static_cast<std::int64_t>(e.samples),
               std::abs(e.mean - exact) / e.std_error});
    return t;
}

report::Table det(const Options& o)
{
    const DomainParams p = params_of(o);
    const DomainPoint pt = point_of(p, o);
    report::Table t({"z_norm_sq", "w_tilde_sq", "det"});
    t.add_row({pt.z().squaredNorm(), pt.w_tilde_sq(), metric_det(p, pt)});
    return t;
}

report::Table kernel(const Options& o)
{
    const DomainParams p = params_of(o);
    const Weight w = weight_of(o);
    const DomainPoint pt = point_of(p, o);
    const TruncationPolicy policy = policy_of(o);
    const SeriesResult k = kernel_diag(p, w, pt, policy);
    const SeriesResult e = epsilon(p, w, pt, policy);
    report::Table t({"z_norm_sq", "w_tilde_sq", "kernel", "degree", "tail_bound", "epsilon"});
    t.add_row({pt.z().squaredNorm(), pt.w_tilde_sq(), k.value, std::int64_t{k.degree}, k.tail_bound, e.value});
    return t;
}

report::Table run_verify(const Options& o, bool& pass)
{
    static const std::map<std::string, verify::Suite> suites{{"invariance", verify::Suite::invariance},
                                                             {"psi", verify::Suite::psi},
                                                             {"oracle", verify::Suite::oracle},
                                                             {"identity", verify::Suite::identity},
                                                             {"all", verify::Suite::all}};
    verify::Config cfg;
    cfg.seed = o.seed;
    cfg.samples = mc_of(o).samples;
    cfg.truncation = policy_of(o);
    const auto results = verify::run(suites.at(o.suite), cfg);
    pass = verify::all_pass(results);
    return verify::to_table(results);
}

/// Closed form against the oracle for every (p, q) with |p| <= 2, |q| <= 2.
report::Table oracle_compare(const Options& o, bool& pass)
{
    const DomainParams p = params_of(o);
    const Weight w = weight_of(o);
    const McConfig base = mc_of(o);
    auto indices = [](int len) {
        std::vector<MultiIndex> out;
        std::vector<unsigned> e(static_cast<std::size_t>(len), 0u);
        for (unsigned total = 0; total <= 2; ++total) {
            // all compositions of `total` into `len` parts
            std::function<void(int, unsigned)> rec = [&](int pos, unsigned left) {
                if (pos == len - 1) {
                    e[static_cast<std::size_t>(pos)] = left;
                    out.emplace_back(e);
                    return;
                }
                for (unsigned k = 0; k <= left; ++k) {
                    e[static_cast<std::size_t>(pos)] = left - k;
                    rec(pos + 1, k);
                }
            };
            rec(0, total);
        }
        return out;
    };
    report::Table t({"p", "q", "closed_form", "mc_mean", "mc_std_error", "mc_samples", "z_score", "within_3_se"});
    pass = true;
    std::uint64_t case_index = 0;
    for (const MultiIndex& pi : indices(p.n())) {
        for (const MultiIndex& qi : indices(p.m())) {
            const double exact = monomial_norm_sq(p, w, pi, qi);
            McConfig cfg = base;
            cfg.seed = base.seed + case_index++;
            McEstimate e = monomial_norm_mc(p, w, pi, qi, cfg);
            double z = std::abs(e.mean - exact) / e.std_error;
            if (z > 3.0) {
                cfg.samples *= 4;
                cfg.seed += verify::detail::kRerunSeedOffset;
                e = monomial_norm_mc(p, w, pi, qi, cfg);
                z = std::abs(e.mean - exact) / e.std_error;
            }
            pass = pass && z <= 3.0;
            t.add_row({join(pi), join(qi), exact, e.mean, e.std_error, static_cast<std::int64_t>(e.samples), z,
                       z <= 3.0});
        }
    }
    return t;
}

void emit(const report::Table& t, const Options& o)
{
    const report::Format f = o.format == "json" ? report::Format::json : report::Format::csv;
    if (o.output.empty()) {
        report::write(t, f, std::cout);
        return;
    }
    std::ofstream file(o.output, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open --output file: " + o.output);
    report::write(t, f, file);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kaehler geometry and weighted Bergman kernels of Fock-Bargmann-Hartogs domains"};
    app.require_subcommand(1);
    Options o;

    auto* balanced = app.add_subcommand("check-balanced", "decide balancedness of alpha g(mu; nu)");
    add_shared(balanced, o);

    auto* grid = app.add_subcommand("epsilon-grid", "epsilon on a grid of |w~|^2 values");
    add_shared(grid, o);
    grid->add_option("--grid", o.grid, "|w~|^2 values in [0, 0.95]")->required()->delimiter(',');

    auto* norm_cmd = app.add_subcommand("norm", "squared norm of the monomial z^p w^q");
    add_shared(norm_cmd, o);
    norm_cmd->add_option("-p", o.p, "exponents of z (length n)")->delimiter(',');
    norm_cmd->add_option("-q", o.q, "exponents of w (length m)")->delimiter(',');
    norm_cmd->add_flag("--oracle", o.oracle, "add a Monte Carlo cross-check");

    auto* det_cmd = app.add_subcommand("det", "determinant of the metric");
    auto* kernel_cmd = app.add_subcommand("kernel", "Bergman kernel on the diagonal");
    for (auto* cmd : {det_cmd, kernel_cmd}) {
        add_shared(cmd, o);
        auto* origin = cmd->add_flag("--at-origin", o.at_origin, "evaluate at z = 0, w = 0");
        cmd->add_option("--z-norm-sq", o.z_norm_sq, "|z|^2")->excludes(origin);
        cmd->add_option("--w-tilde-sq", o.w_tilde_sq, "|w~|^2")->excludes(origin);
    }

    auto* verify_cmd = app.add_subcommand("verify", "run a property suite");
    add_shared(verify_cmd, o);
    verify_cmd->add_option("--suite", o.suite, "suite to run")
        ->check(CLI::IsMember({"invariance", "psi", "oracle", "identity", "all"}))
        ->capture_default_str();

    auto* compare = app.add_subcommand("oracle-compare", "closed-form norms against the Monte Carlo oracle");
    add_shared(compare, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalidArguments;
    }

    try {
        bool pass = true;
        if (balanced->parsed()) emit(check_balanced(o), o);
        else if (grid->parsed()) emit(epsilon_grid(o), o);
        else if (norm_cmd->parsed()) emit(norm(o), o);
        else if (det_cmd->parsed()) emit(det(o), o);
        else if (kernel_cmd->parsed()) emit(kernel(o), o);
        else if (verify_cmd->parsed()) emit(run_verify(o, pass), o);
        else if (compare->parsed()) emit(oracle_compare(o, pass), o);
        return pass ? 0 : kExitVerificationFailure;
    } catch (const TruncationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitVerificationFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalidArguments;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalidArguments;
    }
}
