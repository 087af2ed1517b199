// csk3: command-line front end.
//
// Exit codes: 0 success, 2 inconclusive, 1 error.

#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csk3/report.hpp"

#ifndef CSK3_DEFAULT_FACTS
#define CSK3_DEFAULT_FACTS ""
#endif

using namespace csk3;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInconclusive = 2;

Integer parse_integer(const std::string& s, const std::string& what) {
    Integer n;
    if (s.empty() || n.set_str(s, 10) != 0) throw InvalidArgument(what + ": not an integer: " + s);
    return n;
}

Rational parse_rational(const std::string& s, const std::string& what) {
    Rational q;
    if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0) throw InvalidArgument(what + ": not a rational: " + s);
    q.canonicalize();
    return q;
}

std::pair<int, int> parse_grid(const std::string& s) {
    auto x = s.find('x');
    if (x == std::string::npos) throw InvalidArgument("grid must look like 10x3: " + s);
    int i = std::stoi(s.substr(0, x)), j = std::stoi(s.substr(x + 1));
    if (i < 1 || j < 1) throw InvalidArgument("grid sizes must be positive: " + s);
    return {i, j};
}

struct Context {
    RunConfig config;
    std::string svg_path;
    std::string svg_axis = "Y";

    ExternalFactTable facts() const {
        const std::string& path = config.facts_path.empty() ? std::string(CSK3_DEFAULT_FACTS) : config.facts_path;
        if (path.empty()) throw Error("no external fact table configured (use --facts)");
        return ExternalFactTable::load(path);
    }

    void emit(const Json& report) const {
        if (config.format == "csv")
            std::cout << to_csv(report);
        else
            std::cout << report.dump(2) << "\n";
    }

    void write_svg(const Atlas& atlas, const Rational& lo, const Rational& hi) const {
        if (svg_path.empty()) return;
        if (svg_axis != "X" && svg_axis != "Y") throw InvalidArgument("--svg-axis must be X or Y");
        write_file_atomic(svg_path, atlas_svg(atlas, lo, hi, svg_axis[0]));
    }
};

int cmd_twist_rank(const Context& ctx, const std::string& D_text) {
    const Integer D = parse_integer(D_text, "D");
    ctx.config.check_size(D, "D");
    if (D < 1 || !is_squarefree(D)) throw InvalidArgument("D must be a squarefree positive integer");
    PointCache cache(resolve_cache_path(ctx.config.cache_path));
    auto cert = cached_positive_rank(cache, D, ctx.config.search_height_bound);
    if (!cert && ctx.config.allow_external_facts) {
        auto table = ctx.facts();
        cert = certify_positive_rank(D, TwistFamily::Congruent, 1, &table);
    }
    Json r = envelope("twist-rank");
    r["D"] = D.get_str();
    r["curve"] = TwistedCurve(D).str();
    r["verdict"] = cert ? "certified" : "inconclusive";
    if (cert) {
        if (cert->witness) {
            r["witness"] = to_json(*cert->witness);
            r["witness_model"] = normalized_model_str(TwistedCurve(D));
        }
        r["provenance"] = to_string(cert->provenance.kind);
        if (!cert->provenance.search_based()) r["citation"] = cert->provenance.citation;
    }
    r["height_bound"] = ctx.config.search_height_bound;
    r["root_number"] = root_number(D);
    auto fam = expected_rank_family(D);
    r["expected_family"] = Json{{"positive_rank_expected", fam.positive}, {"citation", fam.citation}};
    cache.save();
    ctx.emit(r);
    return cert ? kOk : kInconclusive;
}

Json ledger_for(const std::optional<RankPositivityCertificate>& cert) {
    if (!cert || sgn(cert->curve.D()) <= 0) return nullptr;
    return to_json(make_selmer_ledger(cert->curve.D(), {*cert}));
}

SprCertificate run_spr(const Context& ctx, const Integer& d, const Integer& a, const Integer& C) {
    for (const auto* n : {&d, &a, &C}) ctx.config.check_size(*n, "parameter");
    std::optional<ExternalFactTable> table;
    if (ctx.config.allow_external_facts) table = ctx.facts();
    auto cert = spr_check(d, a, C, ctx.config.search_height_bound, table ? &*table : nullptr);
    PointCache cache(resolve_cache_path(ctx.config.cache_path));
    for (const auto* leg : {&cert.jacobian, &cert.curve})
        if (*leg && (*leg)->witness)
            cache.insert(TwistFamily::Congruent, (*leg)->curve.D(),
                         {*(*leg)->witness, (*leg)->provenance.kind == Provenance::Kind::SearchFound ? "search" : "torsor-image",
                          ctx.config.search_height_bound});
    cache.save();
    return cert;
}

int cmd_spr(const Context& ctx, const std::string& d_text, const std::string& a_text, const std::string& C_text) {
    const Integer d = parse_integer(d_text, "d"), a = parse_integer(a_text, "a"), C = parse_integer(C_text, "C");
    auto cert = run_spr(ctx, d, a, C);
    Json r = envelope("spr");
    r["surface"] = SurfaceFamily(d, a).str();
    r["certificate"] = to_json(cert);
    r["ledgers"] = Json{{"jacobian", ledger_for(cert.jacobian)}, {"curve", ledger_for(cert.curve)}};
    ctx.emit(r);
    return cert.complete() ? kOk : kInconclusive;
}

int cmd_atlas(const Context& ctx, const std::string& d_text, const std::string& a_text, const std::string& C_text) {
    const Integer d = parse_integer(d_text, "d"), a = parse_integer(a_text, "a"), C = parse_integer(C_text, "C");
    auto cert = run_spr(ctx, d, a, C);
    Json r = envelope("atlas");
    r["certificate"] = to_json(cert);
    r["grid"] = Json{{"max_i", ctx.config.grid_i}, {"max_j", ctx.config.grid_j}};
    if (!cert.torsor_witness || !cert.curve || !cert.curve->witness) {
        r["verdict"] = "inconclusive";
        r["rows"] = Json::array();
        ctx.emit(r);
        return kInconclusive;
    }
    SurfaceFamily S(d, a);
    auto atlas = atlas_generate(cert, ctx.config.grid_i, ctx.config.grid_j);
    std::size_t verified = 0;
    for (const auto& P : atlas.points)
        if (surface_contains(S, P)) ++verified;
    if (verified != atlas.points.size()) throw Error("atlas point failed exact verification");
    r["verdict"] = "ok";
    r["count"] = atlas.points.size();
    r["verified"] = verified;
    r["exceptional_skips"] = atlas.exceptional_skips;
    Json jumps = Json::array();
    for (const auto& row : rank_jump_table(S, atlas)) jumps.push_back(to_json(row));
    r["rank_jumps"] = jumps;
    Json rows = Json::array();
    for (const auto& P : atlas.points) {
        Json row = to_json(P);
        row["evaluation_class"] = evaluation_class(a, P.T).representative.get_str();
        rows.push_back(row);
    }
    r["rows"] = rows;
    if (!atlas.points.empty()) {
        Rational lo = atlas.points.front().T, hi = atlas.points.back().T;
        if (lo == hi) {
            lo -= 1;
            hi += 1;
        }
        ctx.write_svg(atlas, lo, hi);
    }
    ctx.emit(r);
    return kOk;
}

int cmd_density(const Context& ctx, const std::string& d_text, const std::string& a_text, const std::string& C_text,
                const std::string& grids_text, const std::string& lo_text, const std::string& hi_text) {
    const Integer d = parse_integer(d_text, "d"), a = parse_integer(a_text, "a"), C = parse_integer(C_text, "C");
    const Rational lo = parse_rational(lo_text, "lo"), hi = parse_rational(hi_text, "hi");
    std::vector<std::pair<int, int>> grids;
    std::stringstream ss(grids_text);
    for (std::string g; std::getline(ss, g, ',');) grids.push_back(parse_grid(g));
    if (grids.empty()) throw InvalidArgument("no grids given");
    auto cert = run_spr(ctx, d, a, C);
    Json r = envelope("density");
    r["certificate"] = to_json(cert);
    if (!cert.torsor_witness || !cert.curve || !cert.curve->witness) {
        r["verdict"] = "inconclusive";
        r["rows"] = Json::array();
        ctx.emit(r);
        return kInconclusive;
    }
    Json rows = Json::array();
    std::optional<Rational> prev;
    bool non_increasing = true, all_signs = true;
    Atlas last;
    for (const auto& [gi, gj] : grids) {
        auto atlas = atlas_generate(cert, gi, gj);
        auto rep = density_report(atlas, lo, hi, ctx.config.precision);
        if (prev && rep.max_gap > *prev) non_increasing = false;
        prev = rep.max_gap;
        all_signs = all_signs && rep.both_Y_signs_present;
        Json row{{"grid", std::to_string(gi) + "x" + std::to_string(gj)}, {"points", atlas.points.size()}};
        row.update(to_json(rep));
        rows.push_back(row);
        last = std::move(atlas);
    }
    r["verdict"] = "ok";
    r["max_gap_non_increasing"] = non_increasing;
    r["both_Y_signs_in_every_atlas"] = all_signs;
    r["note"] = "density is evidenced by sampling, not proved";
    r["rows"] = rows;
    ctx.write_svg(last, lo, hi);
    ctx.emit(r);
    return kOk;
}

int cmd_solubility(const Context& ctx, const std::string& a_text, const std::string& C_text, bool brute,
                   unsigned depth) {
    const Integer a = parse_integer(a_text, "a"), C = parse_integer(C_text, "C");
    ctx.config.check_size(C, "C");
    Json r = envelope("solubility");
    r["a"] = a.get_str();
    r["C"] = C.get_str();
    const auto H = QuarticTorsor::cassels_schinzel(C, a);
    r["torsor"] = H.str();
    int code = kOk;
    if (a == 1 || a == -1 || a == 2 || a == -2) {
        auto v = (abs(a) == 1) ? solubility_a1(C) : solubility_a2(C);
        r["verdict"] = to_string(v.kind);
        r["criterion"] = v.criterion;
        if (v.kind == Solubility::Unknown) code = kInconclusive;
    } else if (!brute) {
        throw InvalidArgument("no criterion for a = " + a.get_str() + "; use --brute");
    }
    if (brute) {
        Json rows = Json::array();
        bool everywhere = true;
        for (const auto& place : bad_places(H)) {
            bool ok = brute_local_solubility(H, place, depth);
            everywhere = everywhere && ok;
            rows.push_back(Json{{"place", place.str()}, {"soluble", ok}});
        }
        r["brute_force"] = Json{{"everywhere_locally_soluble", everywhere}, {"depth", depth}};
        r["rows"] = rows;
        if (!r.contains("verdict")) r["verdict"] = everywhere ? "Soluble" : "Insoluble";
    }
    ctx.emit(r);
    return code;
}

int cmd_root_number(const Context& ctx, const std::string& d_text, const std::string& a_text,
                    const std::vector<std::string>& T_texts, int sample, std::uint64_t seed) {
    const Integer d = parse_integer(d_text, "d"), a = parse_integer(a_text, "a");
    std::vector<Rational> Ts;
    for (const auto& t : T_texts) Ts.push_back(parse_rational(t, "T"));
    if (sample > 0) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> num(-20, 20), den(1, 20);
        while (static_cast<int>(Ts.size()) < static_cast<int>(T_texts.size()) + sample) {
            int l = num(rng), m = den(rng);
            if (std::gcd(l < 0 ? -l : l, m) != 1) continue;
            Ts.push_back(make_rational(Integer(l), Integer(m)));
        }
    }
    if (Ts.empty()) throw InvalidArgument("give --T values or --sample N");
    auto rows = root_number_survey(d, a, Ts);
    Json r = envelope("root-number");
    r["d"] = d.get_str();
    r["a"] = a.get_str();
    if (sample > 0) r["seed"] = seed;
    std::set<int> seen;
    Json jrows = Json::array();
    for (const auto& row : rows) {
        Json j{{"T", row.T.get_str()}, {"fiber_class", row.fiber_class.get_str()}};
        if (row.root_number) {
            j["root_number"] = *row.root_number;
            seen.insert(*row.root_number);
        } else {
            j["root_number"] = "unsupported";
        }
        jrows.push_back(j);
    }
    r["constant"] = seen.size() == 1 ? Json(*seen.begin()) : Json(nullptr);
    r["rows"] = jrows;
    ctx.emit(r);
    return kOk;
}

int cmd_descent(const Context& ctx, const std::string& D_text) {
    const Integer D = parse_integer(D_text, "D");
    ctx.config.check_size(D, "D");
    if (D < 1 || !is_squarefree(D)) throw InvalidArgument("D must be a squarefree positive integer");
    TwistedCurve tc(D);
    const auto E = tc.normalized();
    std::vector<RankPositivityCertificate> certs;
    Json pts = Json::array();
    for (const auto& P : search_points(E, ctx.config.search_height_bound)) {
        if (sgn(P.y()) <= 0 || torsion_test(E, P)) continue;
        certs.push_back({tc, P, {Provenance::Kind::SearchFound, ctx.config.search_height_bound, {}}, 1});
        pts.push_back(to_json(P));
    }
    auto ledger = make_selmer_ledger(D, certs);
    if (!ledger.consistent()) throw Error("rank lower bound exceeds the Selmer bound for E^" + D.get_str());
    Json r = envelope("descent");
    r["D"] = D.get_str();
    r["curve"] = tc.str();
    r["height_bound"] = ctx.config.search_height_bound;
    r["non_torsion_points"] = pts;
    r["points_model"] = normalized_model_str(tc);
    r["ledger"] = to_json(ledger);
    r["root_number"] = root_number(D);
    r["verdict"] = ledger.rank_lower_bound > 0 ? "positive-rank" : "inconclusive";
    ctx.emit(r);
    return ledger.rank_lower_bound > 0 ? kOk : kInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact arithmetic on d(1 + a^2 T^4) Y^2 = X^3 - X and its twists"};
    app.require_subcommand(1);
    Context ctx;
    std::string factor_bound_text;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--height-bound", ctx.config.search_height_bound, "naive height bound for point searches")
            ->capture_default_str();
        sub->add_option("--factor-bound", factor_bound_text, "largest |n| accepted for factorization (default 2^63)");
        sub->add_option("--format", ctx.config.format, "json or csv")->capture_default_str();
        sub->add_option("--cache", ctx.config.cache_path, "witness cache file (env CSK3_CACHE)");
        sub->add_flag("--allow-external-facts", ctx.config.allow_external_facts, "use the curated rank table");
        sub->add_option("--facts", ctx.config.facts_path, "external fact table");
    };

    std::string D_text, d_text = "", a_text = "", C_text = "", grid_text = "10x3", grids_text = "10x2,30x2,60x2";
    std::string lo_text = "-2", hi_text = "2";
    std::vector<std::string> T_texts;
    int sample = 0;
    std::uint64_t seed = 1;
    bool brute = false;
    unsigned depth = 24;

    auto* twist = app.add_subcommand("twist-rank", "positive-rank certificate for y^2 = x^3 - D^2 x");
    twist->add_option("D", D_text, "squarefree D >= 1")->required();
    add_common(twist);

    auto add_dac = [&](CLI::App* sub) {
        sub->add_option("-d,--d", d_text, "surface twist d")->required();
        sub->add_option("-a,--a", a_text, "surface parameter a")->required();
        sub->add_option("-C,--C", C_text, "torsor twist C")->required();
    };

    auto* spr = app.add_subcommand("spr", "certificate that both factors of the C-twisted product have positive rank");
    add_dac(spr);
    add_common(spr);

    auto* atlas = app.add_subcommand("atlas", "surface points generated from an SPR certificate");
    add_dac(atlas);
    add_common(atlas);
    atlas->add_option("--grid", grid_text, "multiples x torsor steps, e.g. 10x3")->capture_default_str();
    atlas->add_option("--svg", ctx.svg_path, "write a (T, Y) scatter plot");
    atlas->add_option("--svg-axis", ctx.svg_axis, "vertical axis: X or Y")->capture_default_str();

    auto* density = app.add_subcommand("density", "gap statistics of T-projections for nested atlases");
    add_dac(density);
    add_common(density);
    density->add_option("--grids", grids_text, "comma-separated nested grids")->capture_default_str();
    density->add_option("--lo", lo_text, "interval start")->capture_default_str();
    density->add_option("--hi", hi_text, "interval end")->capture_default_str();
    density->add_option("--precision", ctx.config.precision, "decimal digits for gap display")->capture_default_str();
    density->add_option("--svg", ctx.svg_path, "write a (T, Y) scatter plot of the largest atlas");
    density->add_option("--svg-axis", ctx.svg_axis, "vertical axis: X or Y")->capture_default_str();

    auto* sol = app.add_subcommand("solubility", "local solubility of C s^2 = 1 + a^2 t^4");
    sol->add_option("-a,--a", a_text, "parameter a")->required();
    sol->add_option("-C,--C", C_text, "twist C")->required();
    sol->add_flag("--brute", brute, "also run the p-adic and real search at every bad place");
    sol->add_option("--depth", depth, "p-adic refinement depth")->capture_default_str();
    add_common(sol);

    auto* rn = app.add_subcommand("root-number", "root numbers of the fibres E^{d(1 + a^2 T^4)}");
    rn->add_option("-d,--d", d_text, "surface twist d")->required();
    rn->add_option("-a,--a", a_text, "surface parameter a")->required();
    rn->add_option("--T", T_texts, "fibre parameters (rationals)");
    rn->add_option("--sample", sample, "random T = l/m with |l|, m <= 20");
    rn->add_option("--seed", seed, "random seed")->capture_default_str();
    add_common(rn);

    auto* descent = app.add_subcommand("descent", "2-descent rank lower bound and Selmer ledger for E^D");
    descent->add_option("D", D_text, "squarefree D >= 1")->required();
    add_common(descent);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (!factor_bound_text.empty()) ctx.config.factorization_bound = parse_integer(factor_bound_text, "factor-bound");
        if (*atlas) std::tie(ctx.config.grid_i, ctx.config.grid_j) = parse_grid(grid_text);
        ctx.config.validate();
        if (*twist) return cmd_twist_rank(ctx, D_text);
        if (*spr) return cmd_spr(ctx, d_text, a_text, C_text);
        if (*atlas) return cmd_atlas(ctx, d_text, a_text, C_text);
        if (*density) return cmd_density(ctx, d_text, a_text, C_text, grids_text, lo_text, hi_text);
        if (*sol) return cmd_solubility(ctx, a_text, C_text, brute, depth);
        if (*rn) return cmd_root_number(ctx, d_text, a_text, T_texts, sample, seed);
        if (*descent) return cmd_descent(ctx, D_text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
