#pragma once

// The surfaces d (1 + a^2 T^4) Y^2 = X^3 - X, the double cover
// (x, y, t, s) -> (x, y / s, t) from the product of the twist
// dC y^2 = x^3 - x with the torsor C s^2 = 1 + a^2 t^4, certificates that
// both factors carry infinitely many points, and atlases of surface points
// generated from such a certificate.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "csk3/criteria.hpp"
#include "csk3/elliptic.hpp"
#include "csk3/quartic.hpp"

namespace csk3 {

struct SurfaceFamily {
    Integer d, a;

    SurfaceFamily(Integer d_, Integer a_) : d(std::move(d_)), a(std::move(a_)) {
        if (d == 0 || !is_squarefree(d)) throw InvalidArgument("surface parameter d = " + d.get_str() + " is not squarefree");
        if (a == 0 || !is_squarefree(a)) throw InvalidArgument("surface parameter a = " + a.get_str() + " is not squarefree");
    }

    /// d (1 + a^2 T^4)
    Rational f(const Rational& T) const {
        Rational T2 = T * T;
        return Rational(d) * (Rational(1) + Rational(a * a) * T2 * T2);
    }

    std::string str() const {
        return d.get_str() + "(1 + " + Integer(a * a).get_str() + " T^4) Y^2 = X^3 - X";
    }
};

struct SurfacePoint {
    Rational X, Y, T;
    bool exceptional = false;  // Y = 0 or X in {0, 1, -1}

    friend bool operator==(const SurfacePoint& p, const SurfacePoint& q) {
        return p.X == q.X && p.Y == q.Y && p.T == q.T;
    }
    /// Order by (T, X, Y).
    friend bool operator<(const SurfacePoint& p, const SurfacePoint& q) {
        if (p.T != q.T) return p.T < q.T;
        if (p.X != q.X) return p.X < q.X;
        return p.Y < q.Y;
    }

    std::string str() const { return "(" + X.get_str() + ", " + Y.get_str() + ", " + T.get_str() + ")"; }
};

inline bool is_exceptional(const Rational& X, const Rational& Y) {
    return Y == 0 || X == 0 || X == 1 || X == -1;
}

struct Membership {
    bool on_surface = false;
    bool exceptional = false;
    explicit operator bool() const { return on_surface; }
};

inline Membership surface_contains(const SurfaceFamily& S, const SurfacePoint& P) {
    Membership m;
    m.on_surface = S.f(P.T) * P.Y * P.Y == P.X * P.X * P.X - P.X;
    m.exceptional = m.on_surface && is_exceptional(P.X, P.Y);
    return m;
}

/// Class of 1 + a^2 T^4 in Q*/Q*^2: the C for which the point lies on the
/// image of the C-twisted product.
inline SquarefreeClass evaluation_class(const Integer& a, const Rational& T) {
    Rational T2 = T * T;
    return squarefree_class(Rational(1) + Rational(a * a) * T2 * T2);
}

/// Class D of d (1 + a^2 T^4): the fibre over T is the twist E^D.
inline SquarefreeClass fiber_twist_class(const Integer& d, const Integer& a, const Rational& T) {
    Rational T2 = T * T;
    return squarefree_class(Rational(d) * (Rational(1) + Rational(a * a) * T2 * T2));
}

/// (x, y) on dC y^2 = x^3 - x and (t, s) on C s^2 = 1 + a^2 t^4 map to
/// (x, y / s, t) on the surface.
inline SurfacePoint phi_map(const Integer& d, const Integer& a, const Integer& C, const CurvePoint& P,
                            const TorsorPoint& Q) {
    if (P.is_infinity()) throw ExceptionalPoint("phi_map: curve point at infinity");
    if (Rational(C * d) * P.y() * P.y() != P.x() * P.x() * P.x() - P.x())
        throw OffCurve("point " + P.str() + " is not on " + Integer(C * d).get_str() + " y^2 = x^3 - x");
    if (!QuarticTorsor::cassels_schinzel(C, a).contains(Q))
        throw OffCurve("point " + Q.str() + " is not on " + QuarticTorsor::cassels_schinzel(C, a).str());
    if (Q.s == 0) throw ExceptionalPoint("phi_map: torsor point " + Q.str() + " is on the branch locus s = 0");
    SurfacePoint out{P.x(), P.y() / Q.s, Q.t};
    out.exceptional = is_exceptional(out.X, out.Y);
    return out;
}

// ---------------------------------------------------------------------------
// Twist bookkeeping: the model k y^2 = x^3 - x for arbitrary nonzero integer k
// against the normalized model of its squarefree class.

namespace detail {

/// k = D m^2 with D squarefree; returns (D, m).
inline std::pair<Integer, Integer> split_square(const Integer& k) {
    Integer D = squarefree_kernel(k);
    Integer m2 = k / D;
    return {D, isqrt(m2)};
}

/// y^2 = x^3 - D^2 x  ->  D m^2 y^2 = x^3 - x.
inline CurvePoint normalized_to_model(const Integer& k, const CurvePoint& P) {
    auto [D, m] = split_square(k);
    CurvePoint Q = denormalize_twist(TwistedCurve(D), P);
    if (Q.is_infinity()) return Q;
    return {Q.x(), Q.y() / Rational(m)};
}

/// Inverse of normalized_to_model for rational k = D m^2.
inline CurvePoint model_to_normalized(const Rational& k, const CurvePoint& P) {
    SquarefreeClass D = squarefree_class(k);
    auto m = rational_sqrt(k / Rational(D.representative));
    if (P.is_infinity()) return P;
    return normalize_twist(TwistedCurve(D.representative), CurvePoint(P.x(), P.y() * *m));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SPR certificates

enum class LegStatus { Found, External, Inconclusive };

inline const char* to_string(LegStatus s) {
    switch (s) {
        case LegStatus::Found: return "found";
        case LegStatus::External: return "external";
        case LegStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

/// Evidence that the torsor C s^2 = 1 + a^2 t^4 and the twist dC y^2 = x^3 - x
/// both have infinitely many rational points.
struct SprCertificate {
    Integer d, a, C;
    std::uint64_t height_bound = 0;

    LegStatus torsor_status = LegStatus::Inconclusive;
    std::optional<TorsorPoint> torsor_witness;

    LegStatus jacobian_status = LegStatus::Inconclusive;  // E^{2aC}
    std::optional<RankPositivityCertificate> jacobian;

    LegStatus curve_status = LegStatus::Inconclusive;  // E^{dC}
    std::optional<RankPositivityCertificate> curve;

    bool complete() const {
        return torsor_status != LegStatus::Inconclusive && jacobian_status != LegStatus::Inconclusive &&
               curve_status != LegStatus::Inconclusive;
    }

    bool uses_external_facts() const {
        return jacobian_status == LegStatus::External || curve_status == LegStatus::External;
    }

    /// Re-checks every witness that is present.
    bool verify() const {
        if (torsor_witness && !QuarticTorsor::cassels_schinzel(C, a).contains(*torsor_witness)) return false;
        if (jacobian && (!jacobian->verify() || jacobian->curve.D() != squarefree_kernel(2 * a * C))) return false;
        if (curve && (!curve->verify() || curve->curve.D() != squarefree_kernel(d * C))) return false;
        return (torsor_status == LegStatus::Inconclusive || torsor_witness) &&
               (jacobian_status == LegStatus::Inconclusive || jacobian) &&
               (curve_status == LegStatus::Inconclusive || curve);
    }
};

inline LegStatus leg_status(const std::optional<RankPositivityCertificate>& cert) {
    if (!cert) return LegStatus::Inconclusive;
    return cert->provenance.search_based() ? LegStatus::Found : LegStatus::External;
}

namespace detail {

/// A non-torsion point on the Jacobian of H carried over from torsor points:
/// images of the hyperelliptic and t -> -t symmetries of the origin first,
/// then small searched torsor points.
inline std::optional<CurvePoint> torsor_image_witness(const TorsorMap& map, const WeierstrassCurve& target,
                                                      std::uint64_t height_bound) {
    auto lambda = isomorphism_scale(map.curve(), target);
    if (!lambda) return std::nullopt;
    const TorsorPoint& O = map.origin();
    std::vector<TorsorPoint> candidates{hyperelliptic_involution(O)};
    if (map.torsor().G().d == 0) {
        candidates.push_back({-O.t, O.s});
        candidates.push_back({-O.t, -O.s});
    }
    for (const auto& P : search_torsor_points(map.torsor(), std::min<std::uint64_t>(height_bound, 32)))
        candidates.push_back(P);
    for (const auto& P : candidates) {
        CurvePoint R = map.forward(P);
        if (R.is_infinity() || torsion_test(map.curve(), R)) continue;
        CurvePoint W = apply_scale(*lambda, R);
        return sgn(W.y()) < 0 ? -W : W;
    }
    return std::nullopt;
}

}  // namespace detail

/// Assembles the three legs: a torsor point on H_a^C, positive rank of the
/// Jacobian twist E^{2aC} (search, else the image of torsor points, else an
/// external fact), and positive rank of E^{dC} (search, else external fact).
/// External facts are only consulted when `facts` is non-null.
inline SprCertificate spr_check(const Integer& d, const Integer& a, const Integer& C, std::uint64_t height_bound,
                                const ExternalFactTable* facts = nullptr) {
    SurfaceFamily family(d, a);
    if (C == 0 || !is_squarefree(C)) throw InvalidArgument("C = " + C.get_str() + " is not squarefree");
    if (height_bound < 1) throw InvalidArgument("height bound must be positive");
    SprCertificate cert;
    cert.d = d;
    cert.a = a;
    cert.C = C;
    cert.height_bound = height_bound;

    const auto H = QuarticTorsor::cassels_schinzel(C, a);
    cert.torsor_witness = find_torsor_point(H, height_bound);
    if (cert.torsor_witness) cert.torsor_status = LegStatus::Found;

    const Integer DJ = squarefree_kernel(2 * a * C);
    cert.jacobian = certify_positive_rank(DJ, TwistFamily::Congruent, height_bound);
    if (!cert.jacobian && cert.torsor_witness) {
        TwistedCurve tc(DJ);
        TorsorMap map(H, *cert.torsor_witness);
        if (auto W = detail::torsor_image_witness(map, tc.normalized(), height_bound))
            cert.jacobian = RankPositivityCertificate{tc, *W, {Provenance::Kind::TorsorImage, height_bound, {}}, 1};
    }
    if (!cert.jacobian && facts) cert.jacobian = certify_positive_rank(DJ, TwistFamily::Congruent, 1, facts);
    cert.jacobian_status = leg_status(cert.jacobian);

    const Integer Dc = squarefree_kernel(d * C);
    cert.curve = certify_positive_rank(Dc, TwistFamily::Congruent, height_bound, facts);
    cert.curve_status = leg_status(cert.curve);
    return cert;
}

// ---------------------------------------------------------------------------
// Atlas

struct Atlas {
    Integer d, a, C;
    std::vector<SurfacePoint> points;  // sorted by (T, X, Y), distinct
    std::size_t exceptional_skips = 0;

    std::string id() const {
        return "d=" + d.get_str() + ",a=" + a.get_str() + ",C=" + C.get_str();
    }
};

/// Curve-side points i P + tau (1 <= i <= max_i, tau in E[2] + O) from the
/// curve witness, carried to dC y^2 = x^3 - x.
inline std::vector<CurvePoint> atlas_curve_points(const SprCertificate& cert, int max_i) {
    if (!cert.curve || !cert.curve->witness) throw InvalidArgument("atlas needs a search-found curve witness");
    const auto E = cert.curve->curve.normalized();
    std::vector<CurvePoint> translates{CurvePoint::infinity()};
    for (const auto& T : rational_two_torsion(E)) translates.push_back(T);
    std::vector<CurvePoint> out;
    CurvePoint iP;
    for (int i = 1; i <= max_i; ++i) {
        iP = add(E, iP, *cert.curve->witness);
        for (const auto& tau : translates) out.push_back(detail::normalized_to_model(cert.d * cert.C, add(E, iP, tau)));
    }
    return out;
}

/// Torsor-side points: preimages of j W + tau' (0 <= j < max_j, tau' in
/// E[2] + O) under the torsor map with the torsor witness as origin, W the
/// first non-torsion image of a torsor point, together with their images
/// under s -> -s. Preimages over t = infinity are counted in `skipped`.
inline std::vector<TorsorPoint> atlas_torsor_points(const SprCertificate& cert, int max_j, std::size_t& skipped) {
    if (!cert.torsor_witness) throw InvalidArgument("atlas needs a torsor witness");
    const auto H = QuarticTorsor::cassels_schinzel(cert.C, cert.a);
    TorsorMap map(H, *cert.torsor_witness);
    const auto& E = map.curve();
    std::optional<CurvePoint> W;
    std::vector<TorsorPoint> candidates{hyperelliptic_involution(map.origin())};
    for (const auto& P : search_torsor_points(H, 32)) candidates.push_back(P);
    for (const auto& P : candidates) {
        CurvePoint R = map.forward(P);
        if (!R.is_infinity() && !torsion_test(E, R)) {
            W = R;
            break;
        }
    }
    std::vector<CurvePoint> translates{CurvePoint::infinity()};
    for (const auto& T : rational_two_torsion(E)) translates.push_back(T);
    std::vector<TorsorPoint> out;
    auto push = [&](const TorsorPoint& Q) {
        if (std::find(out.begin(), out.end(), Q) == out.end()) out.push_back(Q);
    };
    CurvePoint jW;
    for (int j = 0; j < max_j; ++j) {
        if (j > 0) {
            if (!W) break;
            jW = add(E, jW, *W);
        }
        for (const auto& tau : translates) {
            try {
                TorsorPoint Q = map.backward(add(E, jW, tau));
                push(Q);
                push(hyperelliptic_involution(Q));
            } catch (const ExceptionalPoint&) {
                ++skipped;
            }
        }
    }
    return out;
}

/// phi_C of all pairs of curve-side and torsor-side points, off the
/// excluded locus (s = 0, y = 0).
inline Atlas atlas_generate(const SprCertificate& cert, int max_i, int max_j) {
    if (max_i < 1 || max_j < 1) throw InvalidArgument("atlas grid sizes must be positive");
    if (!cert.verify()) throw Error("atlas: certificate does not verify");
    Atlas atlas{cert.d, cert.a, cert.C, {}, 0};
    auto curve_pts = atlas_curve_points(cert, max_i);
    auto torsor_pts = atlas_torsor_points(cert, max_j, atlas.exceptional_skips);
    for (const auto& P : curve_pts) {
        if (P.is_infinity() || P.y() == 0) {
            ++atlas.exceptional_skips;
            continue;
        }
        for (const auto& Q : torsor_pts) {
            if (Q.s == 0) {
                ++atlas.exceptional_skips;
                continue;
            }
            atlas.points.push_back(phi_map(cert.d, cert.a, cert.C, P, Q));
        }
    }
    std::sort(atlas.points.begin(), atlas.points.end());
    atlas.points.erase(std::unique(atlas.points.begin(), atlas.points.end()), atlas.points.end());
    return atlas;
}

}  // namespace csk3
