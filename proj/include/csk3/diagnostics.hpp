#pragma once

// Reports over atlases: spacing of the T-coordinates in a real interval,
// fibres with a certified non-torsion point, and root numbers along fibres.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csk3/criteria.hpp"
#include "csk3/surface.hpp"

namespace csk3 {

struct DensityReport {
    Rational lo, hi;
    std::size_t samples = 0;  // atlas points with lo <= T <= hi
    Rational max_gap;
    std::string max_gap_decimal;
    bool both_Y_signs_present = false;
    std::string sample_source;
    unsigned precision = 30;
};

/// Decimal rendering of q with `digits` significant digits.
inline std::string to_decimal(const Rational& q, unsigned digits) {
    // bits ~ digits * log2(10), with headroom
    mpf_class f(q, static_cast<mp_bitcnt_t>(digits * 4 + 16));
    mp_exp_t exp;
    std::string mant = f.get_str(exp, 10, digits);
    if (mant.empty() || mant == "0") return "0";
    std::string sign;
    if (mant[0] == '-') {
        sign = "-";
        mant.erase(0, 1);
    }
    std::string out;
    if (exp <= 0) {
        out = "0." + std::string(static_cast<std::size_t>(-exp), '0') + mant;
    } else if (static_cast<std::size_t>(exp) >= mant.size()) {
        out = mant + std::string(static_cast<std::size_t>(exp) - mant.size(), '0');
    } else {
        out = mant.substr(0, exp) + "." + mant.substr(exp);
    }
    return sign + out;
}

/// Largest gap between consecutive T-values of the atlas in [lo, hi], the
/// interval ends counting as sample positions, so a single point at T gives
/// max(T - lo, hi - T) and an empty intersection gives hi - lo. Gaps are
/// exact; the decimal form is for display.
inline DensityReport density_report(const Atlas& atlas, const Rational& lo, const Rational& hi,
                                    unsigned precision = 30) {
    if (atlas.points.empty()) throw InvalidArgument("density report of an empty atlas");
    if (!(lo < hi)) throw InvalidArgument("density interval needs lo < hi");
    if (precision < 1) throw InvalidArgument("precision must be positive");
    DensityReport r;
    r.lo = lo;
    r.hi = hi;
    r.precision = precision;
    r.sample_source = atlas.id();
    std::vector<Rational> ts{lo};
    for (const auto& P : atlas.points)
        if (lo <= P.T && P.T <= hi) {
            ++r.samples;
            ts.push_back(P.T);
        }
    ts.push_back(hi);
    std::sort(ts.begin(), ts.end());
    r.max_gap = 0;
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (ts[i] - ts[i - 1] > r.max_gap) r.max_gap = ts[i] - ts[i - 1];
    r.max_gap_decimal = to_decimal(r.max_gap, precision);
    std::set<SurfacePoint> all(atlas.points.begin(), atlas.points.end());
    for (const auto& P : atlas.points)
        if (sgn(P.Y) > 0 && all.count(SurfacePoint{P.X, -P.Y, P.T})) {
            r.both_Y_signs_present = true;
            break;
        }
    return r;
}

struct RankJumpRow {
    Rational T;
    Integer fiber_class;
    CurvePoint fiber_point;  // (X, Y) on d (1 + a^2 T^4) Y^2 = X^3 - X
    CurvePoint witness;      // the same point on y^2 = x^3 - D^2 x
    std::optional<int> torsion_order;  // always empty in emitted rows
};

/// One row per T carrying a non-exceptional atlas point that is non-torsion
/// on its fibre, the first such point in atlas order.
inline std::vector<RankJumpRow> rank_jump_table(const SurfaceFamily& S, const Atlas& atlas) {
    std::vector<RankJumpRow> rows;
    for (const auto& P : atlas.points) {
        if (!surface_contains(S, P)) throw OffCurve("atlas point " + P.str() + " is not on " + S.str());
        if (is_exceptional(P.X, P.Y)) continue;
        if (!rows.empty() && rows.back().T == P.T) continue;
        const Rational k = S.f(P.T);
        const Integer D = squarefree_class(k).representative;
        CurvePoint fp{P.X, P.Y};
        CurvePoint w = detail::model_to_normalized(k, fp);
        if (torsion_test(TwistedCurve(D).normalized(), w)) continue;
        rows.push_back({P.T, D, fp, w, std::nullopt});
    }
    return rows;
}

struct RootNumberRow {
    Rational T;
    Integer fiber_class;
    std::optional<int> root_number;  // empty when the class is negative
};

inline std::vector<RootNumberRow> root_number_survey(const Integer& d, const Integer& a,
                                                     const std::vector<Rational>& Ts) {
    SurfaceFamily S(d, a);
    std::vector<RootNumberRow> rows;
    for (const auto& T : Ts) {
        RootNumberRow row{T, fiber_twist_class(d, a, T).representative, std::nullopt};
        if (sgn(row.fiber_class) > 0) row.root_number = root_number(row.fiber_class);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace csk3
