// Command-line front end: generators, JSON I/O, and one subcommand per
// library operation, emitting JSON reports (and CSV where useful).
// Exit code 0 iff every asserted inequality in the run holds.

#include <CLI11.hpp>
#include <json.hpp>

#include <flowtree/flowtree.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace flowtree;
using nlohmann::json;

namespace {

int env_threads() {
    const char* t = std::getenv("FLOWTREE_THREADS");
    if (!t) return 1;
    int v = std::atoi(t);
    return v >= 1 ? v : 1;
}

void emit(const json& report, const std::string& out_path) {
    std::string text = report.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

json trapezoid_json(const Trapezoid& R) {
    if (R.singleton) return json{{"kind", "singleton"}, {"root", R.root}};
    return json{{"kind", "band"}, {"root", R.root}, {"h1", R.h1}, {"h2", R.h2}};
}

std::vector<Rat> parse_grid(const std::string& csv) {
    std::vector<Rat> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        out.push_back(rat_from_string(csv.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

// Deterministic mean-zero (1,infinity)-atom on the window: the difference of
// two normalized indicators inside a small band.
Atom canonical_atom(const FlowMeasure& m) {
    const TreeWindow& w = m.window();
    // prefer a branching vertex (band = its sons), fall back to a
    // two-level band on a chain segment
    for (VertexId v = 0; v < w.size(); ++v) {
        if (w.degree(v) < 2) continue;
        Trapezoid R = Trapezoid::band(v, 1, 2);
        VertexId y1 = w.children(v)[0], y2 = w.children(v)[1];
        VertexFunction a(w);
        a[y1] = Rat(1) / m.mass(y1);
        a[y2] = Rat(-1) / m.mass(y2);
        Rat scale = a.max_abs() * trapezoid_mass(m, R);
        a *= Rat(1) / scale;
        return Atom{R, std::move(a), kInfiniteExponent};
    }
    VertexId top = w.apex();
    Trapezoid R = Trapezoid::band(top, 1, 3);
    if (!fits(w, R)) throw InvalidParams("window too shallow for the canonical atom");
    VertexId y1 = w.children(top)[0], y2 = w.children(y1)[0];
    VertexFunction a(w);
    a[y1] = Rat(1) / m.mass(y1);
    a[y2] = Rat(-1) / m.mass(y2);
    Rat scale = a.max_abs() * trapezoid_mass(m, R);
    a *= Rat(1) / scale;
    return Atom{R, std::move(a), kInfiniteExponent};
}

// Atom built from a user function: the mean-zero part of f on a band,
// normalized in the sup norm so it is a (1,infinity)-atom (hence (1,p)).
std::optional<Atom> atom_from_function(const FlowMeasure& m, const VertexFunction& f,
                                       const TrapezoidFamilyConfig& cfg) {
    const TreeWindow& w = m.window();
    BMOReport rep = bmo_norm(m, f, 1, cfg);
    Trapezoid R = rep.witness;
    if (R.singleton || rep.norm_pow == 0) return std::nullopt;
    auto mem = members(w, R);
    Rat avg = m.integral_over(f, mem) / trapezoid_mass(m, R);
    VertexFunction a(w);
    for (VertexId x : mem) a[x] = f[x] - avg;
    Rat scale = a.max_abs() * trapezoid_mass(m, R);
    if (scale == 0) return std::nullopt;
    a *= Rat(1) / scale;
    return Atom{R, std::move(a), kInfiniteExponent};
}

struct RunInputs {
    std::string tree_path, func_path, kernel_path, out_path, csv_path;
    std::string alpha = "8", lambda = "1/2", gamma = "1/264", grid;
    int p = 2, q = 1;
    int beta_check = 0;
    unsigned long long seed = 1;
};

int do_run(const std::string& op, const RunInputs& in) {
    TreeBundle t = parse_tree_spec(read_file(in.tree_path));
    const TreeWindow& w = *t.window;
    const FlowMeasure& m = *t.measure;
    const TrapezoidFamilyConfig& cfg = t.cfg;
    json rep;
    rep["operation"] = op;
    rep["threads"] = env_threads();
    rep["seed"] = in.seed;
    rep["beta"] = cfg.beta;
    bool ok = true;

    auto load_func = [&]() -> VertexFunction {
        if (in.func_path.empty()) throw InvalidParams("this operation needs --func");
        return parse_function_spec(read_file(in.func_path), w);
    };

    if (op == "validate") {
        json viol = json::array();
        for (VertexId v = 0; v < w.size(); ++v) {
            if (m.mass(v) <= 0) {
                viol.push_back({{"vertex", v}, {"issue", "nonpositive mass"}});
                continue;
            }
            if (w.is_leaf(v)) continue;
            Rat s = 0;
            for (VertexId c : w.children(v)) s += m.mass(c);
            if (s != m.mass(v))
                viol.push_back({{"vertex", v},
                                {"issue", "flow sum mismatch"},
                                {"expected", rat_to_string(s)},
                                {"actual", rat_to_string(m.mass(v))}});
        }
        ok = viol.empty() && validate_flow(m);
        rep["valid_flow"] = ok;
        rep["violations"] = std::move(viol);
        rep["total_mass"] = rat_to_string(m.total_mass());
    } else if (op == "stats") {
        DoublingReport d = doubling_report(m);
        rep["c_upper"] = rat_to_string(d.c_upper);
        rep["lower_ok"] = d.lower_ok;
        rep["max_degree"] = d.max_degree;
        rep["branch_count_max"] = d.branch_count_max;
        rep["growth_alpha"] = d.growth_alpha;
        if (d.k_gain) rep["k_gain"] = rat_to_string(*d.k_gain);
        ok = Rat(static_cast<long>(d.max_degree)) <= d.c_upper || d.max_degree <= 1;
        json iso = json::array();
        VertexId deep = w.apex();
        for (int r = 1; r <= std::min(8, w.height()); ++r) {
            Rat ratio = isoperimetric_ratio(m, deep, r);
            bool row_ok = ratio == Rat(2, r + 1);
            iso.push_back({{"r", r}, {"ratio", rat_to_string(ratio)}, {"ok", row_ok}});
            ok = ok && row_ok;
        }
        rep["isoperimetric"] = std::move(iso);
    } else if (op == "maximal") {
        VertexFunction f = load_func();
        MaximalReport M = hl_maximal(m, f, cfg);
        MaximalReport S = sharp_maximal(m, f, cfg);
        Rat fmax = f.max_abs();
        bool dominated = true, bounded = M.max_value() <= fmax;
        for (VertexId x = 0; x < w.size(); ++x)
            if (S.values[x] > 2 * M.values[x]) dominated = false;
        ok = dominated && bounded;
        rep["max_hl"] = rat_to_string(M.max_value());
        rep["max_sharp"] = rat_to_string(S.max_value());
        rep["sharp_le_2hl"] = dominated;
        rep["hl_le_sup"] = bounded;
        if (!in.csv_path.empty()) {
            std::string csv = "vertex,hl,sharp\n";
            for (VertexId x = 0; x < w.size(); ++x)
                csv += std::to_string(x) + "," + rat_to_string(M.values[x]) + "," +
                       rat_to_string(S.values[x]) + "\n";
            write_file(in.csv_path, csv);
        }
    } else if (op == "weak11") {
        VertexFunction f = load_func();
        std::vector<Rat> grid =
            in.grid.empty() ? std::vector<Rat>{rat_from_string(in.lambda)} : parse_grid(in.grid);
        json rows = json::array();
        for (const Rat& lam : grid) {
            auto r = weak11_check(m, f, lam, cfg);
            rows.push_back({{"lambda", rat_to_string(lam)},
                            {"lhs", rat_to_string(r.lhs)},
                            {"rhs", rat_to_string(r.rhs)},
                            {"ok", r.ok}});
            ok = ok && r.ok;
            auto sel = vitali_select(m, f, lam, cfg);
            rows.back()["selected"] = sel.size();
        }
        rep["rows"] = std::move(rows);
    } else if (op == "cz") {
        VertexFunction f = load_func();
        Rat alpha = rat_from_string(in.alpha);
        CZDecomposition cz = cz_decompose(m, f, alpha, cfg);
        Rat C = cz.c_tilde_value;
        bool good_bound = cz.good.max_abs() <= C * alpha;
        bool recon = true, zero_mean = true, l1_bound = true;
        VertexFunction sum = cz.good;
        Rat mass_sum = 0;
        for (const auto& [E, b] : cz.bad) {
            sum += b;
            if (m.integral(b) != 0) zero_mean = false;
            if (m.l1_norm(b) > 2 * C * alpha * trapezoid_mass(m, E)) l1_bound = false;
            mass_sum += trapezoid_mass(m, E);
        }
        recon = sum == f;
        bool mass_ok = mass_sum * alpha <= m.l1_norm(f);
        ok = good_bound && recon && zero_mean && l1_bound && mass_ok;
        rep["c_tilde"] = rat_to_string(C);
        rep["bad_count"] = cz.bad.size();
        rep["good_bound_ok"] = good_bound;
        rep["reconstruction_ok"] = recon;
        rep["zero_mean_ok"] = zero_mean;
        rep["l1_bound_ok"] = l1_bound;
        rep["mass_sum_ok"] = mass_ok;
    } else if (op == "split") {
        VertexFunction f = load_func();
        Rat lam = rat_from_string(in.lambda);
        auto sp = interpolation_split(m, f, lam, in.p, cfg);
        Rat C = c_tilde(m, cfg);
        unsigned p = static_cast<unsigned>(in.p);
        bool sup_ok = rat_pow(sp.good.max_abs(), p) <= C * rat_pow(lam, p);
        Rat mass_sum = 0;
        VertexFunction sum = sp.good;
        for (const auto& [R, b] : sp.bad) {
            mass_sum += trapezoid_mass(m, R);
            sum += b;
        }
        bool mass_ok = mass_sum * rat_pow(lam, p) <= m.lp_norm_pow(f, p);
        bool recon = sum == f;
        ok = sup_ok && mass_ok && recon;
        rep["p"] = in.p;
        rep["sup_bound_ok"] = sup_ok;
        rep["mass_bound_ok"] = mass_ok;
        rep["reconstruction_ok"] = recon;
        rep["h1_bound"] = rat_to_string(sp.h1_bound);
    } else if (op == "bmo") {
        VertexFunction f = load_func();
        BMOReport r1 = bmo_norm(m, f, 1, cfg);
        rep["bmo1"] = rat_to_string(r1.norm_pow);
        rep["witness"] = trapezoid_json(r1.witness);
        if (in.q >= 2) {
            BMOReport rq = bmo_norm(m, f, in.q, cfg);
            rep["q"] = in.q;
            rep["bmo_q_pow"] = rat_to_string(rq.norm_pow);
            rep["bmo_q"] = rq.norm_double;
            if (in.q == 2) {
                bool holder = rat_pow(r1.norm_pow, 2) <= rq.norm_pow;
                rep["bmo1_le_bmo2"] = holder;
                ok = ok && holder;
            }
        }
        MaximalReport S = sharp_maximal(m, f, cfg);
        bool sharp_eq = S.max_value() == r1.norm_pow;
        rep["sharp_sup_equals_bmo1"] = sharp_eq;
        ok = ok && sharp_eq;
    } else if (op == "jn") {
        VertexFunction f = load_func();
        if (f.is_constant()) throw ConstantFunction("jn: constant function");
        std::vector<Rat> grid = in.grid.empty()
                                    ? std::vector<Rat>{Rat(1, 2), Rat(1), Rat(3, 2), Rat(2), Rat(3), Rat(4)}
                                    : parse_grid(in.grid);
        BMOReport r1 = bmo_norm(m, f, 1, cfg);
        auto dist = jn_distribution(m, f, r1.witness, grid, cfg);
        bool monotone = true;
        for (std::size_t i = 1; i < dist.size(); ++i)
            if (dist[i].second > dist[i - 1].second) monotone = false;
        JNFit fit = jn_fit(m, {f}, grid, cfg);
        bool envelope_ok = true;
        for (const auto& [tt, ratio] : dist)
            if (rat_to_double(ratio) > fit.A * std::exp(-fit.eta * rat_to_double(tt)) * (1 + 1e-9))
                envelope_ok = false;
        ok = monotone && envelope_ok;
        rep["eta"] = fit.eta;
        rep["A"] = fit.A;
        rep["degenerate"] = fit.degenerate;
        rep["points"] = fit.points;
        rep["monotone"] = monotone;
        if (!in.csv_path.empty()) {
            std::string csv = "t,ratio\n";
            for (const auto& [tt, ratio] : dist)
                csv += rat_to_string(tt) + "," + rat_to_string(ratio) + "\n";
            write_file(in.csv_path, csv);
        }
    } else if (op == "atoms") {
        VertexFunction f = load_func();
        auto maybe = atom_from_function(m, f, cfg);
        if (!maybe) throw ConstantFunction("atoms: function has no oscillation to atomize");
        Atom a = *maybe;
        bool valid_inf = validate_atom(m, a);
        Atom ap{a.support, a.values, in.p};
        bool valid_p = validate_atom(m, ap);
        Rat alpha = rat_from_string(in.alpha);
        AtomicDecomposition dec = atom_upgrade(m, ap, alpha, 3, cfg);
        bool atoms_valid = true;
        for (const auto& out_atom : dec.atoms)
            if (!validate_atom(m, out_atom)) atoms_valid = false;
        // residual decays at least by 2^p/alpha^p per round
        bool decay_ok = true;
        Rat factor = rat_pow(Rat(2), static_cast<unsigned>(in.p)) /
                     rat_pow(alpha, static_cast<unsigned>(in.p));
        for (std::size_t i = 1; i < dec.residual_l1_history.size(); ++i)
            if (dec.residual_l1_history[i] > factor * dec.residual_l1_history[i - 1])
                decay_ok = false;
        ok = valid_inf && valid_p && atoms_valid && decay_ok;
        rep["valid_infinity"] = valid_inf;
        rep["valid_p"] = valid_p;
        rep["upgrade_atoms"] = dec.atoms.size();
        rep["upgrade_atoms_valid"] = atoms_valid;
        rep["residual_l1"] = rat_to_string(dec.residual_l1);
        rep["decay_ok"] = decay_ok;
        rep["coefficient_sum"] = rat_to_string(dec.coefficient_sum);
        if (in.beta_check > cfg.beta) {
            // demonstrate the rebase on a synthetic wide-band atom when the
            // window is deep enough
            int h2 = std::min(in.beta_check, w.height() + 1);
            if (h2 > cfg.beta) {
                Trapezoid wide = Trapezoid::band(w.apex(), 1, h2);
                VertexFunction av(w);
                auto mem = members(w, wide);
                av[mem.front()] = Rat(1) / m.mass(mem.front());
                av[mem.back()] -= Rat(1) / m.mass(mem.back());
                Rat scale = av.max_abs() * trapezoid_mass(m, wide);
                av *= Rat(1) / scale;
                Atom awide{wide, std::move(av), kInfiniteExponent};
                auto pieces = atom_rebase(m, awide, cfg, in.beta_check);
                bool rebase_ok = true;
                VertexFunction sum(w);
                Rat coef_total = 0;
                for (auto& [coef, piece] : pieces) {
                    if (!validate_atom(m, piece)) rebase_ok = false;
                    VertexFunction scaled = piece.values;
                    scaled *= coef;
                    sum += scaled;
                    coef_total += coef;
                }
                rebase_ok = rebase_ok && sum == awide.values && coef_total <= 4;
                rep["rebase_ok"] = rebase_ok;
                ok = ok && rebase_ok;
            }
        }
    } else if (op == "dyadic") {
        VertexId start = w.spine().back();
        DyadicFamily fam = build_dyadic(w, cfg, start);
        bool partitions = true;
        for (int j = fam.j_min; j <= fam.j_max; ++j) {
            std::vector<int> cnt(w.size(), 0);
            for (const auto& R : fam.scale(j))
                for (VertexId x : members(w, R)) ++cnt[x];
            for (VertexId x = 0; x < w.size(); ++x)
                if (cnt[x] != 1) partitions = false;
        }
        ok = partitions;
        rep["j_min"] = fam.j_min;
        rep["j_max"] = fam.j_max;
        rep["partitions_ok"] = partitions;
        rep["chain_length"] = fam.chain.size();
    } else if (op == "goodlambda") {
        VertexFunction f = load_func();
        DyadicFamily fam = build_dyadic(w, cfg, w.spine().back());
        Rat lam = rat_from_string(in.lambda), gam = rat_from_string(in.gamma);
        auto r = good_lambda_check(m, f, fam, lam, gam, cfg);
        ok = r.ok;
        rep["lambda"] = rat_to_string(lam);
        rep["gamma"] = rat_to_string(gam);
        rep["lhs"] = rat_to_string(r.lhs);
        rep["rhs"] = rat_to_string(r.rhs);
        rep["ok"] = r.ok;
        rep["c_prime"] = rat_to_string(2 * cfg.beta * c_tilde(m, cfg));
    } else if (op == "fs-ratio") {
        VertexFunction f = load_func();
        DyadicFamily fam = build_dyadic(w, cfg, w.spine().back());
        Rat ratio = fefferman_stein_ratio(m, f, fam, in.p, cfg);
        rep["p"] = in.p;
        rep["ratio_pow"] = rat_to_string(ratio);
        rep["ratio_pow_double"] = rat_to_double(ratio);
        ok = ratio >= 0;
    } else if (op == "hormander") {
        if (in.kernel_path.empty()) throw InvalidParams("hormander needs --kernel");
        Kernel K = parse_kernel_spec(read_file(in.kernel_path), w);
        HormanderReport h1 = hormander_1star(m, K, cfg);
        HormanderReport h2 = hormander_2star(m, K, cfg);
        HormanderReport h1t = hormander_1star(m, K.transpose(), cfg);
        bool transpose_ok = h2.value == h1t.value;
        bool star_ok = true;
        for (const Trapezoid& R : enumerate_all(w, cfg)) {
            if (R.singleton || !star_fits(w, R)) continue;
            if (m.set_mass(star_set(w, R)) > 3 * trapezoid_mass(m, R)) star_ok = false;
        }
        Atom a = canonical_atom(m);
        Rat probe = h1_l1_probe(m, K, {a});
        ok = transpose_ok && star_ok;
        rep["one_star"] = rat_to_string(h1.value);
        rep["two_star"] = rat_to_string(h2.value);
        rep["excluded"] = h1.excluded;
        rep["transpose_ok"] = transpose_ok;
        rep["star_mass_ok"] = star_ok;
        rep["h1_l1_probe"] = rat_to_string(probe);
    } else if (op == "pair") {
        VertexFunction f = load_func();
        Atom a = canonical_atom(m);
        Rat pairing = duality_pairing(m, f, a);
        Rat bmo1 = bmo_norm(m, f, 1, cfg).norm_pow;
        ok = rat_abs(pairing) <= bmo1;
        rep["pairing"] = rat_to_string(pairing);
        rep["bmo1"] = rat_to_string(bmo1);
        rep["bounded"] = ok;
    } else {
        throw InvalidParams("unknown operation: " + op);
    }

    rep["ok"] = ok;
    emit(rep, in.out_path);
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowtree: exact-arithmetic harmonic analysis on tree windows"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a tree spec file");
    std::string kind = "homogeneous", gen_out;
    unsigned q = 2, max_degree = 3;
    unsigned long long seed = 1;
    int top = 4, bottom = 0, beta = 12;
    gen->add_option("--kind", kind, "homogeneous|random|chain");
    gen->add_option("--q", q, "branching for homogeneous trees");
    gen->add_option("--max-degree", max_degree, "degree bound for random trees");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--top", top, "top level");
    gen->add_option("--bottom", bottom, "bottom level");
    gen->add_option("--beta", beta, "trapezoid family parameter");
    gen->add_option("--out", gen_out, "output path (default stdout)");

    // run
    auto* run = app.add_subcommand("run", "run an operation and emit a report");
    std::string op;
    RunInputs in;
    run->add_option("operation", op,
                    "validate|stats|maximal|weak11|cz|split|bmo|jn|atoms|dyadic|goodlambda|"
                    "fs-ratio|hormander|pair")
        ->required();
    run->add_option("--tree", in.tree_path, "tree spec JSON")->required();
    run->add_option("--func", in.func_path, "function spec JSON");
    run->add_option("--kernel", in.kernel_path, "kernel spec JSON");
    run->add_option("--alpha", in.alpha, "threshold (rational string)");
    run->add_option("--lambda", in.lambda, "level (rational string)");
    run->add_option("--gamma", in.gamma, "good-lambda parameter (rational string)");
    run->add_option("--grid", in.grid, "comma-separated rational grid");
    run->add_option("--p", in.p, "integer exponent p");
    run->add_option("--q", in.q, "integer exponent q");
    run->add_option("--beta-check", in.beta_check, "larger family parameter for atom rebase");
    run->add_option("--out", in.out_path, "report path (default stdout)");
    run->add_option("--csv", in.csv_path, "optional CSV output path");
    run->add_option("--seed", in.seed, "seed recorded in the report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            GeneratedTree g;
            if (kind == "homogeneous")
                g = gen_homogeneous(q, top, bottom);
            else if (kind == "chain")
                g = gen_chain(top, bottom);
            else if (kind == "random")
                g = gen_random(max_degree, seed, top, bottom);
            else
                throw InvalidParams("unknown kind: " + kind);
            TreeWindow w = g.window();
            FlowMeasure m = FlowMeasure::from_leaf_masses(w, g.leaf_mass);
            json spec = emit_tree_spec(w, m, beta);
            spec["seed"] = seed;
            emit(spec, gen_out);
            return 0;
        }
        return do_run(op, in);
    } catch (const WindowTooSmall& e) {
        emit(json{{"error", {{"type", "WindowTooSmall"},
                             {"message", e.what()},
                             {"certificate", e.certificate}}}},
             in.out_path);
        return 2;
    } catch (const Error& e) {
        std::string type = "Error";
        if (dynamic_cast<const OutOfWindow*>(&e)) type = "OutOfWindow";
        else if (dynamic_cast<const InvalidTrapezoid*>(&e)) type = "InvalidTrapezoid";
        else if (dynamic_cast<const PreconditionViolated*>(&e)) type = "PreconditionViolated";
        else if (dynamic_cast<const MissingLeaf*>(&e)) type = "MissingLeaf";
        else if (dynamic_cast<const NonPositiveMass*>(&e)) type = "NonPositiveMass";
        else if (dynamic_cast<const AlphaTooSmall*>(&e)) type = "AlphaTooSmall";
        else if (dynamic_cast<const NonIntegerExponent*>(&e)) type = "NonIntegerExponent";
        else if (dynamic_cast<const ConstantFunction*>(&e)) type = "ConstantFunction";
        else if (dynamic_cast<const EmptyCorpus*>(&e)) type = "EmptyCorpus";
        else if (dynamic_cast<const NotRebaseNeeded*>(&e)) type = "NotRebaseNeeded";
        else if (dynamic_cast<const SharpVanishes*>(&e)) type = "SharpVanishes";
        else if (dynamic_cast<const InvalidParams*>(&e)) type = "InvalidParams";
        else if (dynamic_cast<const ParseError*>(&e)) type = "ParseError";
        emit(json{{"error", {{"type", type}, {"message", e.what()}}}}, in.out_path);
        return 2;
    } catch (const std::exception& e) {
        emit(json{{"error", {{"type", "Unexpected"}, {"message", e.what()}}}}, in.out_path);
        return 3;
    }
}
