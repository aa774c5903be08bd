// h6: command-line front end.
//
// Exit codes: 0 pass, 1 usage or configuration error, 2 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "h6/classify.hpp"
#include "h6/config.hpp"
#include "h6/plot.hpp"

namespace {

using namespace h6;

constexpr const char* kVersion = "0.1.0";

struct Options {
    std::string config_path, out;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::size_t steps = 100;
    int samples = 0;
    int degree = 1;
    std::string set, invariants, h_list = "0.1,0.05,0.025,0.0125", mode = "order", invariant = "I1";
    // classify
    int n = 3;
    std::string mu = "-3", nu = "1", variant = "identity", expr;
    double epsilon = 0.1;
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig need_config(const Options& o) {
    if (o.config_path.empty()) throw ConfigError("--config is required for this command");
    auto c = load_config(o.config_path);
    if (o.seed) c.seed = *o.seed;
    return c;
}

json header(const std::string& command, const RunConfig* c) {
    json j;
    j["tool"] = "h6";
    j["version"] = kVersion;
    j["command"] = command;
    if (c) j["config"] = c->resolved();
    return j;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + o.out + "'");
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json params_json(const InvariantParams& p) {
    json j = json::object();
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = *v;
    };
    put("varkappa", p.varkappa);
    put("alpha_plus", p.alpha_plus);
    put("kappa", p.kappa);
    put("eta", p.eta);
    put("zeta", p.zeta);
    put("alpha", p.alpha);
    return j;
}

PhasePoint initial_point(const RunConfig& c) {
    if (c.initial) return *c.initial;
    std::mt19937_64 rng(c.seed);
    return sample_point(rng, c.N, needs_positive_bm(c.potential));
}

std::vector<InvariantId> default_ids(const RunConfig& c) {
    auto ids = family_invariants(c.potential);
    for (const auto& id : casimir_invariants(c.N)) ids.push_back(id);
    return ids;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_h_list(const std::string& s) {
    std::vector<double> v;
    for (const auto& t : split(s)) {
        try {
            v.push_back(std::stod(t));
        } catch (const std::exception&) {
            throw ConfigError("--h-list: not a number '" + t + "'");
        }
    }
    return v;
}

int cmd_simulate(const Options& o) {
    const auto c = need_config(o);
    std::vector<InvariantId> ids;
    if (o.invariants.empty()) ids = default_ids(c);
    else
        for (const auto& s : split(o.invariants)) ids.push_back(parse_invariant(s));
    const auto ctx = c.context();
    const auto params = params_from(c.potential);
    try {
        const auto t = trajectory(initial_point(c), c.potential, ctx, o.steps, names_of(ids), invariant_evaluators(ids, ctx, params));
        std::ostringstream os;
        write_csv(os, t);
        emit(o, os.str());
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cmd_check(const Options& o) {
    const auto c = need_config(o);
    const auto ids = default_ids(c);
    const auto ctx = c.context();
    const double tol = o.tol.value_or(1e-7);
    json j = header("check", &c);
    j["steps"] = o.steps;
    j["tolerance"] = tol;
    bool pass = true;
    try {
        const auto t = trajectory(initial_point(c), c.potential, ctx, o.steps, names_of(ids),
                                  invariant_evaluators(ids, ctx, params_from(c.potential)));
        const auto drift = conservation_report(t);
        json d = json::object();
        for (std::size_t i = 0; i < ids.size(); ++i) {
            d[ids[i].name()] = drift[i];
            pass = pass && drift[i] < tol;
        }
        j["drift"] = d;
    } catch (const DivergenceError& e) {
        j["error"] = e.what();
        j["divergence_step"] = e.step;
        pass = false;
    }
    j["pass"] = pass;
    emit(o, dump(j));
    return pass ? 0 : 2;
}

int cmd_rank(const Options& o) {
    const auto c = need_config(o);
    if (o.set.empty()) throw ConfigError("--set is required");
    const auto params = params_from(c.potential);
    const int samples = o.samples > 0 ? o.samples : 8;
    const auto st = independence_test(o.set, c.context(), params, samples, c.seed);
    const double tol = o.tol.value_or(1e-8);
    json j = header("rank", &c);
    j["set"] = st.set;
    j["N"] = st.N;
    j["lambda"] = c.lambda;
    j["params"] = params_json(params);
    j["samples"] = samples;
    j["tolerance"] = tol;
    std::vector<int> ranks;
    if (tol == 1e-8) ranks = st.ranks;
    else {
        const auto ids = set_members(o.set, c.N);
        for (int s = 0; s < samples; ++s) {
            std::mt19937_64 rng(c.seed + static_cast<std::uint64_t>(s));
            ranks.push_back(numerical_rank(normalize_rows(jacobian_rows(ids, sample_point(rng, c.N), c.context(), params)), tol));
        }
    }
    j["ranks"] = ranks;
    j["mode"] = mode_of(ranks);
    j["min"] = *std::min_element(ranks.begin(), ranks.end());
    j["max"] = *std::max_element(ranks.begin(), ranks.end());
    json sweep = json::object();
    for (const auto& [t, r] : st.sweep) sweep[fmt17(t)] = r;
    j["tolerance_sweep"] = sweep;
    j["tolerance_stable"] = st.tolerance_stable;
    j["expected_rank"] = st.expected;
    const bool pass = mode_of(ranks) == st.expected;
    j["pass"] = pass;
    emit(o, dump(j));
    return pass ? 0 : 2;
}

int cmd_involution(const Options& o) {
    const auto c = need_config(o);
    if (o.set.empty()) throw ConfigError("--set is required");
    const auto params = params_from(c.potential);
    const auto rep = involution_test(o.set, c.context(), params, o.samples > 0 ? o.samples : 10, c.seed);
    json j = header("involution", &c);
    j["set"] = o.set;
    j["members"] = names_of(commuting_subset(o.set, c.N));
    json rows = json::array();
    for (const auto& e : rep.entries)
        rows.push_back({{"a", e.a}, {"b", e.b}, {"exact", e.exact}, {"magnitude", e.magnitude}, {"terms", e.terms}, {"pass", e.pass}});
    j["brackets"] = rows;
    j["pass"] = rep.pass();
    emit(o, dump(j));
    return rep.pass() ? 0 : 2;
}

int cmd_search(const Options& o) {
    const auto c = need_config(o);
    const auto basis = ansatz_basis(o.degree);
    const int samples = o.samples > 0 ? o.samples : static_cast<int>(5 * basis.labels.size());
    const auto r = invariant_search(c.potential, o.degree, c.context(), samples, c.seed);
    json j = header("search", &c);
    j["degree"] = o.degree;
    j["samples"] = samples;
    j["basis"] = std::vector<std::string>(basis.labels.begin() + 1, basis.labels.end());
    j["constant_projected_out"] = true;
    j["dimension"] = r.dimension();
    j["nullspace"] = r.nullspace;
    j["singular_values"] = r.singular_values;
    j["verification_residuals"] = r.residuals;
    j["condition_number"] = std::isfinite(r.condition) ? json(r.condition) : json("inf");
    j["warnings"] = r.warnings;
    emit(o, dump(j));
    return 0;
}

Rational parse_rational(const std::string& s) {
    try {
        Rational r(s);
        r.canonicalize();
        return r;
    } catch (const std::exception&) {
        throw ConfigError("not a rational number: '" + s + "'");
    }
}

int cmd_classify(const Options& o, const std::string& sub) {
    json j = header("classify " + sub, nullptr);
    std::mt19937_64 rng(o.seed.value_or(1));
    bool pass = true;
    if (sub == "mn-det") {
        const auto r = mn_det(o.n, parse_rational(o.mu), parse_rational(o.nu));
        j["n"] = o.n;
        j["mu"] = o.mu;
        j["nu"] = o.nu;
        j["closed_form"] = r.closed_form.get_str();
        j["elimination"] = r.elimination.get_str();
        pass = r.closed_form == r.elimination;
    } else if (sub == "calm-rank") {
        const std::size_t n = static_cast<std::size_t>(o.n);
        std::vector<double> q0(n, 1.0), l0(n, 0.0);
        l0[0] = 1.0;
        const int r0 = numerical_rank(calM(q0, l0), o.tol.value_or(1e-10));
        j["N"] = n;
        j["rank_at_q0_lambda0"] = r0;
        std::vector<int> ranks;
        const int samples = o.samples > 0 ? o.samples : 100;
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int s = 0; s < samples; ++s) {
            std::vector<double> q(n), l(n);
            for (auto& v : q) v = u(rng);
            for (auto& v : l) v = u(rng);
            ranks.push_back(numerical_rank(calM(q, l), o.tol.value_or(1e-10)));
        }
        j["random_ranks"] = ranks;
        pass = r0 == static_cast<int>(n) - 2;
        for (int r : ranks) pass = pass && r >= static_cast<int>(n) - 2 && r <= static_cast<int>(n);
    } else if (sub == "pde-check") {
        const auto c = need_config(o);
        const auto ctx = c.context();
        rng.seed(c.seed);
        const int samples = o.samples > 0 ? o.samples : 10;
        json rows = json::array();
        double worst = 0.0;
        std::optional<ExprTree> raw;
        if (!o.expr.empty()) raw = parse_expr(o.expr, raw_vars(c.N));
        for (int s = 0; s < samples; ++s) {
            const auto x = sample_point(rng, c.N, needs_positive_bm(c.potential));
            const auto r = raw ? pde_residual(*raw, x.q, ctx) : pde_residual(c.potential, x, ctx);
            rows.push_back({{"nonlinear", r.nonlinear}, {"linear", r.linear}, {"relative", r.relative()}});
            worst = std::max(worst, r.relative());
        }
        j["config"] = c.resolved();
        j["source"] = raw ? "expression " + raw->unparse() : "potential " + family_name(c.potential);
        j["samples"] = rows;
        j["max_relative"] = worst;
        pass = worst < o.tol.value_or(1e-10);
    } else if (sub == "closure-probe") {
        Ell ell;
        if (o.variant == "identity") ell.variant = EllVariant::Identity;
        else if (o.variant == "quadratic") ell.variant = EllVariant::Quadratic, ell.epsilon = o.epsilon;
        else if (o.variant == "user") {
            if (o.expr.empty()) throw ConfigError("--expr is required for --variant user");
            ell.variant = EllVariant::User;
            ell.user = parse_expr(o.expr, {"X"});
        } else throw ConfigError("unknown --variant '" + o.variant + "'");
        const std::size_t n = static_cast<std::size_t>(o.n);
        std::uniform_real_distribution<double> u(0.2, 1.0);
        std::vector<double> qn(n), qp(n);
        for (auto& v : qn) v = u(rng);
        for (auto& v : qp) v = u(rng);
        const double s = closure_probe(ell, qn, qp);
        j["variant"] = o.variant;
        if (ell.variant == EllVariant::Quadratic) j["epsilon"] = ell.epsilon;
        if (ell.variant == EllVariant::User) j["expr"] = ell.user.unparse();
        j["q_t"] = qn;
        j["q_t_plus_h"] = qp;
        j["sensitivity"] = s;
        pass = s < o.tol.value_or(1e-12);
    } else {
        throw ConfigError("unknown classify subcommand '" + sub + "'");
    }
    j["pass"] = pass;
    emit(o, dump(j));
    return pass ? 0 : 2;
}

int cmd_continuum(const Options& o) {
    const auto c = need_config(o);
    if (!c.continuum) throw ConfigError("config has no 'continuum' section");
    const auto hs = parse_h_list(o.h_list);
    json j = header("continuum", &c);
    j["mode"] = o.mode;
    j["h"] = hs;
    std::ostringstream csv;
    std::vector<double> ys;
    bool pass = true;
    if (o.mode == "order") {
        const auto r = convergence_order(*c.continuum, c.lambda, c.Q0, c.P0, c.T, hs);
        csv << "h,max_err\n";
        for (std::size_t i = 0; i < hs.size(); ++i) csv << fmt17(hs[i]) << "," << fmt17(r.max_err[i]) << "\n";
        ys = r.max_err;
        j["max_err"] = r.max_err;
        j["slope"] = r.slope;
    } else if (o.mode == "expansion") {
        const auto id = parse_invariant(o.invariant);
        const auto r = expansion_check(id, *c.continuum, c.lambda, hs, c.Q0, c.P0);
        csv << "h,residual\n";
        for (std::size_t i = 0; i < hs.size(); ++i) csv << fmt17(hs[i]) << "," << fmt17(r.residual[i]) << "\n";
        ys = r.residual;
        j["invariant"] = id.name();
        j["leading_constant"] = r.leading;
        j["leading_exact"] = r.leading_exact;
        j["residual"] = r.residual;
        j["order"] = r.order;
        j["monotone"] = r.monotone;
        j["exact"] = r.exact;
        pass = r.passed();
    } else {
        throw ConfigError("--mode must be 'order' or 'expansion'");
    }
    j["pass"] = pass;
    if (!o.out.empty()) {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + o.out + "'");
        f << csv.str();
        std::ofstream svg(o.out + ".svg", std::ios::binary);
        write_loglog_svg(svg, hs, ys, o.mode == "order" ? "discrete vs continuous error" : o.invariant + " expansion residual", "h",
                         o.mode == "order" ? "max error" : "residual");
        j["csv"] = o.out;
        j["svg"] = o.out + ".svg";
    }
    std::cout << dump(j);
    return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"h6 coalgebra maps: simulation and verification"};
    app.set_version_flag("--version", std::string("h6 ") + kVersion);
    app.require_subcommand(1);
    Options o;
    auto global = [&](CLI::App* s) {
        s->add_option("--config", o.config_path, "JSON run configuration");
        s->add_option("--seed", o.seed, "override the config seed");
        s->add_option("--out", o.out, "output file (default stdout)");
        s->add_option("--tol", o.tol, "tolerance override");
    };
    auto* sim = app.add_subcommand("simulate", "iterate the map and write a trajectory CSV");
    global(sim);
    sim->add_option("--steps", o.steps);
    sim->add_option("--invariants", o.invariants, "comma-separated invariant ids");
    auto* chk = app.add_subcommand("check", "conservation drift of the family's invariants");
    global(chk);
    chk->add_option("--steps", o.steps)->default_val(10000);
    auto* rnk = app.add_subcommand("rank", "functional independence by numerical rank");
    global(rnk);
    rnk->add_option("--set", o.set)->required();
    rnk->add_option("--samples", o.samples);
    auto* inv = app.add_subcommand("involution", "Poisson brackets within the commuting subset");
    global(inv);
    inv->add_option("--set", o.set)->required();
    inv->add_option("--samples", o.samples);
    auto* srch = app.add_subcommand("search", "nullspace search for invariants in the generators");
    global(srch);
    srch->add_option("--degree", o.degree)->check(CLI::IsMember({1, 2}));
    srch->add_option("--samples", o.samples);
    auto* cls = app.add_subcommand("classify", "classification checks");
    cls->require_subcommand(1);
    std::string classify_sub;
    for (const char* name : {"mn-det", "calm-rank", "pde-check", "closure-probe"}) {
        auto* s = cls->add_subcommand(name);
        global(s);
        s->add_option("--n", o.n);
        s->add_option("--samples", o.samples);
        s->callback([&, name] { classify_sub = name; });
    }
    cls->get_subcommand("mn-det")->add_option("--mu", o.mu);
    cls->get_subcommand("mn-det")->add_option("--nu", o.nu);
    cls->get_subcommand("pde-check")->add_option("--expr", o.expr, "raw potential in q1..qN");
    cls->get_subcommand("closure-probe")->add_option("--variant", o.variant);
    cls->get_subcommand("closure-probe")->add_option("--expr", o.expr, "l(X) for --variant user");
    cls->get_subcommand("closure-probe")->add_option("--epsilon", o.epsilon);
    auto* cont = app.add_subcommand("continuum", "continuum-limit convergence and expansions");
    global(cont);
    cont->add_option("--mode", o.mode);
    cont->add_option("--h-list", o.h_list);
    cont->add_option("--invariant", o.invariant);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*sim) return cmd_simulate(o);
        if (*chk) return cmd_check(o);
        if (*rnk) return cmd_rank(o);
        if (*inv) return cmd_involution(o);
        if (*srch) return cmd_search(o);
        if (*cls) return cmd_classify(o, classify_sub);
        if (*cont) return cmd_continuum(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
