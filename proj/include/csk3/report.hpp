#pragma once

// Serialization for the command-line tool: run configuration, the on-disk
// witness cache, JSON/CSV reports and SVG scatter plots. Requires
// nlohmann/json on the include path.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "csk3/diagnostics.hpp"

namespace csk3 {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
    std::uint64_t search_height_bound = 100;
    Integer factorization_bound = default_factorization_bound();
    int grid_i = 10;
    int grid_j = 3;
    unsigned precision = 30;
    bool allow_external_facts = false;
    std::string format = "json";  // json | csv
    std::string cache_path;       // empty: no cache
    std::string facts_path;

    void validate() const {
        if (search_height_bound < 1) throw InvalidArgument("height bound must be positive");
        if (factorization_bound < 2) throw InvalidArgument("factorization bound must be at least 2");
        if (grid_i < 1 || grid_j < 1) throw InvalidArgument("grid sizes must be positive");
        if (precision < 1) throw InvalidArgument("precision must be positive");
        if (format != "json" && format != "csv") throw InvalidArgument("format must be json or csv");
    }

    /// Rejects integers the factorization budget cannot handle.
    void check_size(const Integer& n, const std::string& what) const {
        if (abs(n) > factorization_bound)
            throw FactorizationBudgetExceeded(what + " = " + n.get_str() + " exceeds the factorization bound " +
                                              factorization_bound.get_str());
    }
};

/// Cache path from the explicit setting, else the CSK3_CACHE environment
/// variable, else none.
inline std::string resolve_cache_path(const std::string& explicit_path) {
    if (!explicit_path.empty()) return explicit_path;
    if (const char* env = std::getenv("CSK3_CACHE")) return env;
    return {};
}

// ---------------------------------------------------------------------------
// JSON of library values

inline Json to_json(const CurvePoint& P) {
    if (P.is_infinity()) return "O";
    return Json{{"x", P.x().get_str()}, {"y", P.y().get_str()}};
}

inline Json to_json(const TorsorPoint& P) { return Json{{"t", P.t.get_str()}, {"s", P.s.get_str()}}; }

inline Json to_json(const SurfacePoint& P) {
    return Json{{"X", P.X.get_str()}, {"Y", P.Y.get_str()}, {"T", P.T.get_str()}, {"exceptional", P.exceptional}};
}

/// "y^2 = x^3 - 25 x": the normalized model that witnesses live on.
inline std::string normalized_model_str(const TwistedCurve& E) {
    Integer D2 = E.D() * E.D();
    return "y^2 = x^3 " + std::string(E.sign() < 0 ? "- " : "+ ") + D2.get_str() + " x";
}

inline Json to_json(const RankPositivityCertificate& c) {
    Json j{{"D", c.curve.D().get_str()}, {"curve", c.curve.str()}};
    if (c.witness) {
        j["witness"] = to_json(*c.witness);
        j["witness_model"] = normalized_model_str(c.curve);
    }
    j["provenance"] = to_string(c.provenance.kind);
    if (c.provenance.search_based())
        j["height_bound"] = c.provenance.height_bound;
    else
        j["citation"] = c.provenance.citation;
    j["claimed_rank"] = c.claimed_rank;
    j["external"] = !c.provenance.search_based();
    return j;
}

inline Json to_json(const SelmerLedger& l) {
    Json j{{"D", l.D.get_str()},
           {"omega", l.omega},
           {"selmer_upper_bound", l.upper_bound},
           {"rank_lower_bound", l.rank_lower_bound},
           {"consistent", l.consistent()}};
    if (l.external_rank)
        j["external_rank"] = Json{{"rank", l.external_rank->claimed_rank}, {"citation", l.external_rank->citation}};
    j["notes"] = l.notes;
    return j;
}

inline Json to_json(const SprCertificate& c) {
    Json j{{"d", c.d.get_str()}, {"a", c.a.get_str()}, {"C", c.C.get_str()}, {"height_bound", c.height_bound}};
    j["verdict"] = c.complete() ? "certified" : "inconclusive";
    j["uses_external_facts"] = c.uses_external_facts();
    Json legs = Json::object();
    Json torsor{{"curve", QuarticTorsor::cassels_schinzel(c.C, c.a).str()}, {"status", to_string(c.torsor_status)}};
    if (c.torsor_witness) torsor["witness"] = to_json(*c.torsor_witness);
    legs["torsor"] = torsor;
    Json jac{{"D", squarefree_kernel(2 * c.a * c.C).get_str()}, {"status", to_string(c.jacobian_status)}};
    if (c.jacobian) jac["certificate"] = to_json(*c.jacobian);
    legs["jacobian"] = jac;
    Json cur{{"D", squarefree_kernel(c.d * c.C).get_str()}, {"status", to_string(c.curve_status)}};
    if (c.curve) cur["certificate"] = to_json(*c.curve);
    legs["curve"] = cur;
    j["legs"] = legs;
    return j;
}

inline Json to_json(const DensityReport& r) {
    return Json{{"interval", {r.lo.get_str(), r.hi.get_str()}},
                {"samples", r.samples},
                {"max_gap", r.max_gap.get_str()},
                {"max_gap_decimal", r.max_gap_decimal},
                {"precision", r.precision},
                {"branch_coverage", {{"both_Y_signs_present", r.both_Y_signs_present}}},
                {"sample_source", r.sample_source}};
}

inline Json to_json(const RankJumpRow& r) {
    return Json{{"T", r.T.get_str()},
                {"fiber_class", r.fiber_class.get_str()},
                {"fiber_point", to_json(r.fiber_point)},
                {"witness", to_json(r.witness)},
                {"torsion_status", "non-torsion"}};
}

/// Report envelope: schema version and command name first.
inline Json envelope(const std::string& command) {
    return Json{{"schema_version", kSchemaVersion}, {"command", command}};
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string csv_field(const Json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline void flatten(const Json& v, const std::string& prefix, std::vector<std::pair<std::string, Json>>& out) {
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (v.is_array() && !v.empty() && (v[0].is_object() || v[0].is_array())) {
        for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
    } else {
        out.emplace_back(prefix, v);
    }
}

}  // namespace detail

/// A report's "rows" array becomes a table with one column per flattened
/// field of the first row; any other report becomes field,value lines.
inline std::string to_csv(const Json& report) {
    std::ostringstream os;
    if (report.contains("rows") && report["rows"].is_array()) {
        const auto& rows = report["rows"];
        std::vector<std::string> header;
        if (!rows.empty()) {
            std::vector<std::pair<std::string, Json>> first;
            detail::flatten(rows[0], "", first);
            for (const auto& [k, v] : first) header.push_back(k);
        }
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << "\n";
        for (const auto& row : rows) {
            std::vector<std::pair<std::string, Json>> cells;
            detail::flatten(row, "", cells);
            std::map<std::string, Json> by_key(cells.begin(), cells.end());
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (i) os << ",";
                auto it = by_key.find(header[i]);
                if (it != by_key.end()) os << detail::csv_field(it->second);
            }
            os << "\n";
        }
        return os.str();
    }
    std::vector<std::pair<std::string, Json>> cells;
    detail::flatten(report, "", cells);
    os << "field,value\n";
    for (const auto& [k, v] : cells) os << detail::csv_field(k) << "," << detail::csv_field(v) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Files

/// Writes through a temporary file in the same directory and renames it
/// over the target.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot replace " + path + ": " + ec.message());
    }
}

// ---------------------------------------------------------------------------
// Point cache

struct CachedPoint {
    CurvePoint point;          // on the normalized model
    std::string provenance;    // "search" or "torsor-image"
    std::uint64_t budget = 0;  // height bound of the run that found it
};

/// Witness points keyed by (family, twist class). Entries are re-verified
/// on load; anything malformed or off its curve is dropped with a warning.
class PointCache {
public:
    PointCache() = default;
    explicit PointCache(std::string path, std::ostream* warn = &std::cerr) : path_(std::move(path)) {
        if (path_.empty() || !std::filesystem::exists(path_)) return;
        Json doc;
        try {
            std::ifstream in(path_);
            doc = Json::parse(in);
        } catch (const std::exception& e) {
            if (warn) *warn << "warning: ignoring unreadable cache " << path_ << ": " << e.what() << "\n";
            return;
        }
        if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_object()) {
            if (warn) *warn << "warning: ignoring malformed cache " << path_ << "\n";
            return;
        }
        for (auto it = doc["entries"].begin(); it != doc["entries"].end(); ++it) {
            if (!it.value().is_array()) {
                if (warn) *warn << "warning: dropping cache entry " << it.key() << "\n";
                continue;
            }
            for (const auto& rec : it.value()) {
                try {
                    auto [family, D] = parse_key(it.key());
                    TwistedCurve tc(D, family);
                    CachedPoint cp{CurvePoint(Rational(rec.at("x").get<std::string>()),
                                              Rational(rec.at("y").get<std::string>())),
                                   rec.at("provenance").get<std::string>(), rec.at("budget").get<std::uint64_t>()};
                    Rational x = cp.point.x(), y = cp.point.y();
                    if (x.get_den() == 0 || y.get_den() == 0) throw Error("zero denominator");
                    x.canonicalize();
                    y.canonicalize();
                    if (x != cp.point.x() || y != cp.point.y() || !on_curve(tc.normalized(), cp.point))
                        throw Error("point fails verification");
                    entries_[it.key()].push_back(cp);
                } catch (const std::exception& e) {
                    if (warn) *warn << "warning: dropping cache record under " << it.key() << ": " << e.what() << "\n";
                }
            }
        }
    }

    static std::string key(TwistFamily family, const Integer& D) {
        return std::string(to_string(family)) + ":" + D.get_str();
    }

    const std::vector<CachedPoint>* lookup(TwistFamily family, const Integer& D) const {
        auto it = entries_.find(key(family, D));
        return it == entries_.end() ? nullptr : &it->second;
    }

    /// Adds the point unless already present; reports whether it was new.
    bool insert(TwistFamily family, const Integer& D, const CachedPoint& cp) {
        if (!on_curve(TwistedCurve(D, family).normalized(), cp.point)) throw OffCurve("refusing to cache " + cp.point.str());
        auto& list = entries_[key(family, D)];
        for (const auto& e : list)
            if (e.point == cp.point && e.provenance == cp.provenance) return false;
        list.push_back(cp);
        dirty_ = true;
        return true;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& [k, v] : entries_) n += v.size();
        return n;
    }

    void save() {
        if (path_.empty() || !dirty_) return;
        Json doc{{"schema_version", kSchemaVersion}, {"entries", Json::object()}};
        for (const auto& [k, list] : entries_) {
            Json arr = Json::array();
            for (const auto& cp : list)
                arr.push_back(Json{{"x", cp.point.x().get_str()},
                                   {"y", cp.point.y().get_str()},
                                   {"provenance", cp.provenance},
                                   {"budget", cp.budget}});
            doc["entries"][k] = arr;
        }
        write_file_atomic(path_, doc.dump(2) + "\n");
        dirty_ = false;
    }

private:
    static std::pair<TwistFamily, Integer> parse_key(const std::string& k) {
        auto colon = k.find(':');
        if (colon == std::string::npos) throw Error("bad key");
        std::string fam = k.substr(0, colon);
        TwistFamily family;
        if (fam == to_string(TwistFamily::Congruent))
            family = TwistFamily::Congruent;
        else if (fam == to_string(TwistFamily::Plus))
            family = TwistFamily::Plus;
        else
            throw Error("unknown family " + fam);
        Integer D;
        if (D.set_str(k.substr(colon + 1), 10) != 0) throw Error("bad twist class");
        return {family, D};
    }

    std::string path_;
    std::map<std::string, std::vector<CachedPoint>> entries_;
    bool dirty_ = false;
};

/// The canonical search witness for E^D at `height_bound`, from the cache
/// when a cached search witness lies within the bound (search order does
/// not depend on the bound, so the answer is the same), else by search.
inline std::optional<RankPositivityCertificate> cached_positive_rank(PointCache& cache, const Integer& D,
                                                                     std::uint64_t height_bound) {
    TwistedCurve tc(D);
    if (const auto* list = cache.lookup(TwistFamily::Congruent, D))
        for (const auto& cp : *list)
            if (cp.provenance == "search" && naive_height(cp.point.x()) <= height_bound) {
                RankPositivityCertificate cert{tc, cp.point, {Provenance::Kind::SearchFound, height_bound, {}}, 1};
                if (cert.verify()) return cert;
            }
    auto cert = certify_positive_rank(D, TwistFamily::Congruent, height_bound);
    if (cert) cache.insert(TwistFamily::Congruent, D, {*cert->witness, "search", height_bound});
    return cert;
}

// ---------------------------------------------------------------------------
// SVG scatter

struct ScatterPoint {
    double u, v;
};

/// Self-contained SVG 1.1 scatter plot over [u_lo, u_hi] x [v_lo, v_hi];
/// points outside the window are left out.
inline std::string svg_scatter(const std::vector<ScatterPoint>& pts, double u_lo, double u_hi, double v_lo,
                               double v_hi, const std::string& title, const std::string& u_label,
                               const std::string& v_label) {
    const double W = 640, H = 480, margin = 50;
    auto sx = [&](double u) { return margin + (u - u_lo) / (u_hi - u_lo) * (W - 2 * margin); };
    auto sy = [&](double v) { return H - margin - (v - v_lo) / (v_hi - v_lo) * (H - 2 * margin); };
    auto esc = [](const std::string& s) {
        std::string o;
        for (char c : s) {
            if (c == '<')
                o += "&lt;";
            else if (c == '>')
                o += "&gt;";
            else if (c == '&')
                o += "&amp;";
            else
                o += c;
        }
        return o;
    };
    auto num = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", x);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
       << esc(title) << "</text>\n"
       << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << W - 2 * margin << "\" height=\""
       << H - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (v_lo < 0 && v_hi > 0)
        os << "<line x1=\"" << margin << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << W - margin << "\" y2=\""
           << num(sy(0)) << "\" stroke=\"#bbbbbb\"/>\n";
    os << "<text x=\"" << margin << "\" y=\"" << H - margin + 16 << "\" font-family=\"sans-serif\" font-size=\"11\">"
       << num(u_lo) << "</text>\n"
       << "<text x=\"" << W - margin << "\" y=\"" << H - margin + 16
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(u_hi) << "</text>\n"
       << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << esc(u_label) << "</text>\n"
       << "<text x=\"" << margin - 6 << "\" y=\"" << margin + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(v_hi) << "</text>\n"
       << "<text x=\"" << margin - 6 << "\" y=\"" << H - margin
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(v_lo) << "</text>\n"
       << "<text x=\"14\" y=\"" << H / 2 << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
       << H / 2 << ")\" text-anchor=\"middle\">" << esc(v_label) << "</text>\n"
       << "<g fill=\"#1f5fa8\" fill-opacity=\"0.7\">\n";
    for (const auto& p : pts) {
        if (!(p.u >= u_lo && p.u <= u_hi && p.v >= v_lo && p.v <= v_hi)) continue;
        os << "<circle cx=\"" << num(sx(p.u)) << "\" cy=\"" << num(sy(p.v)) << "\" r=\"2.5\"/>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

/// (T, Y) or (T, X) projections of an atlas, T restricted to [lo, hi] and
/// the vertical window symmetric around 0 up to the largest |value| (at
/// most `v_cap`).
inline std::string atlas_svg(const Atlas& atlas, const Rational& lo, const Rational& hi, char axis,
                             double v_cap = 10.0) {
    std::vector<ScatterPoint> pts;
    double vmax = 0;
    for (const auto& P : atlas.points) {
        if (P.T < lo || P.T > hi) continue;
        double v = axis == 'X' ? P.X.get_d() : P.Y.get_d();
        pts.push_back({P.T.get_d(), v});
        vmax = std::max(vmax, std::fabs(v));
    }
    vmax = std::min(std::max(vmax * 1.05, 1.0), v_cap);
    return svg_scatter(pts, lo.get_d(), hi.get_d(), -vmax, vmax, "atlas " + atlas.id(), "T",
                       std::string(1, axis));
}

}  // namespace csk3
