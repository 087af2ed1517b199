#pragma once

// Genus-one quartics C s^2 = G(t) with G(t) = a t^4 + c t^2 + d t + e: the
// classical invariants I, J, the Weierstrass model u^2 = v^3 - 27 I v - 27 J,
// and an explicit isomorphism to a Weierstrass curve once a rational point
// is known.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "csk3/elliptic.hpp"
#include "csk3/polynomial.hpp"

namespace csk3 {

/// a t^4 + c t^2 + d t + e, a != 0 (depressed: no cubic term).
struct QuarticPolynomial {
    Rational a, c, d, e;

    Rational operator()(const Rational& t) const {
        Rational t2 = t * t;
        return (a * t2 + c) * t2 + d * t + e;
    }

    Polynomial as_polynomial() const { return Polynomial({e, d, c, Rational(0), a}); }

    bool integral() const {
        return a.get_den() == 1 && c.get_den() == 1 && d.get_den() == 1 && e.get_den() == 1;
    }

    /// Nonzero terms only, e.g. "4 t^4 + 1" or "t^4 - t^2 + 1/2".
    std::string str() const {
        std::string out;
        auto term = [&](const Rational& k, const char* mono) {
            if (k == 0) return;
            Rational m = abs(k);
            if (out.empty())
                out = sgn(k) < 0 ? "-" : "";
            else
                out += sgn(k) < 0 ? " - " : " + ";
            if (*mono == '\0' || m != 1) out += m.get_str() + (*mono ? " " : "");
            out += mono;
        };
        term(a, "t^4");
        term(c, "t^2");
        term(d, "t");
        term(e, "");
        return out;
    }
};

struct QuarticInvariants {
    Rational I, J;
};

/// I = 12ae + c^2, J = 72ace - 27ad^2 - 2c^3.
inline QuarticInvariants invariants(const QuarticPolynomial& G) {
    if (G.a == 0) throw InvalidArgument("quartic has vanishing leading coefficient");
    Rational I = Rational(12) * G.a * G.e + G.c * G.c;
    Rational J = Rational(72) * G.a * G.c * G.e - Rational(27) * G.a * G.d * G.d - Rational(2) * G.c * G.c * G.c;
    return {I, J};
}

struct TorsorPoint {
    Rational t, s;

    friend bool operator==(const TorsorPoint& p, const TorsorPoint& q) { return p.t == q.t && p.s == q.s; }
    std::string str() const { return "(" + t.get_str() + ", " + s.get_str() + ")"; }
    friend std::ostream& operator<<(std::ostream& os, const TorsorPoint& P) { return os << P.str(); }
};

/// C s^2 = G(t) with C squarefree and G separable.
class QuarticTorsor {
public:
    QuarticTorsor(Integer C, QuarticPolynomial G) : C_(std::move(C)), G_(std::move(G)) {
        if (C_ == 0 || !is_squarefree(C_)) throw InvalidArgument("torsor twist " + C_.get_str() + " is not squarefree");
        auto inv = invariants(G_);
        // 27 * disc(G) = 4 I^3 - J^2
        if (Rational(4) * inv.I * inv.I * inv.I == inv.J * inv.J)
            throw InvalidArgument("quartic " + G_.str() + " has a repeated root");
    }

    /// C s^2 = 1 + a^2 t^4
    static QuarticTorsor cassels_schinzel(const Integer& C, const Integer& a) {
        return {C, {Rational(a * a), Rational(0), Rational(0), Rational(1)}};
    }

    const Integer& C() const { return C_; }
    const QuarticPolynomial& G() const { return G_; }

    bool contains(const TorsorPoint& P) const { return Rational(C_) * P.s * P.s == G_(P.t); }

    std::string str() const { return C_.get_str() + " s^2 = " + G_.str(); }

private:
    Integer C_;
    QuarticPolynomial G_;
};

/// u^2 = v^3 - 27 I v - 27 J, the model of the untwisted quartic s^2 = G(t).
inline WeierstrassCurve weierstrass_model(const QuarticTorsor& H) {
    auto inv = invariants(H.G());
    return {Rational(-27) * inv.I, Rational(-27) * inv.J};
}

/// The Jacobian of C s^2 = G(t): the C-twist of weierstrass_model, obtained
/// from (C s)^2 = C G(t) whose invariants are C^2 I and C^3 J.
inline WeierstrassCurve jacobian_model(const QuarticTorsor& H) {
    auto inv = invariants(H.G());
    Rational C(H.C());
    return {Rational(-27) * C * C * inv.I, Rational(-27) * C * C * C * inv.J};
}

/// (t, s) -> (t, -s)
inline TorsorPoint hyperelliptic_involution(const TorsorPoint& P) { return {P.t, -P.s}; }

/// Isomorphism of a torsor with a rational point onto a short Weierstrass
/// curve, sending the chosen origin to infinity.
///
/// With t = t0 + x and y = C s the torsor becomes y^2 = Q(x) where Q(0) is
/// y0^2. If y0 != 0 the standard substitution for quartics with a square
/// constant term gives a general Weierstrass model, otherwise (t0 a root of
/// G) x = delta / W turns the quartic into a cubic. Either model is then
/// completed to the short form v = 36X + 3 b2, u = 108 (2Y + a1 X + a3).
class TorsorMap {
public:
    TorsorMap(QuarticTorsor torsor, TorsorPoint origin) : H_(std::move(torsor)), origin_(std::move(origin)) {
        if (!H_.contains(origin_)) throw OffCurve("origin " + origin_.str() + " is not on " + H_.str());
        Polynomial shifted = (H_.G().as_polynomial()).shifted(origin_.t);
        const Rational C(H_.C());
        for (int k = 0; k <= 4; ++k) q_[k] = C * shifted.coeff(k);
        y0_ = C * origin_.s;
        branch_ = (y0_ == 0);
        if (branch_) {
            a1_ = a3_ = 0;
            a2_ = q_[2];
            a4_ = q_[3] * q_[1];
            a6_ = q_[4] * q_[1] * q_[1];
        } else {
            const Rational& q = y0_;
            a1_ = q_[1] / q;
            a2_ = q_[2] - q_[1] * q_[1] / (Rational(4) * q * q);
            a3_ = Rational(2) * q * q_[3];
            a4_ = Rational(-4) * q * q * q_[4];
            a6_ = a2_ * a4_;
        }
        b2_ = a1_ * a1_ + Rational(4) * a2_;
        Rational b4 = Rational(2) * a4_ + a1_ * a3_;
        Rational b6 = a3_ * a3_ + Rational(4) * a6_;
        Rational c4 = b2_ * b2_ - Rational(24) * b4;
        Rational c6 = -b2_ * b2_ * b2_ + Rational(36) * b2_ * b4 - Rational(216) * b6;
        curve_.emplace(Rational(-27) * c4, Rational(-54) * c6);
    }

    const QuarticTorsor& torsor() const { return H_; }
    const TorsorPoint& origin() const { return origin_; }
    const WeierstrassCurve& curve() const { return *curve_; }

    CurvePoint forward(const TorsorPoint& P) const {
        if (!H_.contains(P)) throw OffCurve("point " + P.str() + " is not on " + H_.str());
        const Rational x = P.t - origin_.t;
        const Rational y = Rational(H_.C()) * P.s;
        Rational X, Y;
        if (branch_) {
            if (x == 0) return CurvePoint::infinity();
            X = q_[1] / x;
            Y = q_[1] * y / (x * x);
        } else {
            const Rational& q = y0_;
            const Rational &b = q_[3], &c = q_[2], &d = q_[1];
            if (x == 0) {
                if (y == q) return CurvePoint::infinity();
                // Limit along the branch through (0, -q).
                X = d * d / (Rational(4) * q * q) - c;
                Y = (Rational(4) * c * d * q * q - d * d * d - Rational(8) * b * q * q * q * q) / (Rational(4) * q * q * q);
            } else {
                X = (Rational(2) * q * (y + q) + d * x) / (x * x);
                Y = (Rational(4) * q * q * (y + q) + Rational(2) * q * (d * x + c * x * x) -
                     d * d * x * x / (Rational(2) * q)) /
                    (x * x * x);
            }
        }
        return {Rational(36) * X + Rational(3) * b2_, Rational(108) * (Rational(2) * Y + a1_ * X + a3_)};
    }

    /// Throws ExceptionalPoint for points that correspond to t = infinity.
    TorsorPoint backward(const CurvePoint& R) const {
        detail::require_on_curve(*curve_, R);
        if (R.is_infinity()) return origin_;
        const Rational X = (R.x() - Rational(3) * b2_) / 36;
        const Rational Y = (R.y() / 108 - a1_ * X - a3_) / 2;
        Rational x, y;
        if (branch_) {
            if (X == 0) throw ExceptionalPoint("point " + R.str() + " lies over t = infinity");
            x = q_[1] / X;
            y = Y * x * x / q_[1];
        } else {
            if (Y == 0) throw ExceptionalPoint("point " + R.str() + " lies over t = infinity");
            const Rational& q = y0_;
            const Rational &c = q_[2], &d = q_[1];
            x = (Rational(2) * q * (X + c) - d * d / (Rational(2) * q)) / Y;
            y = -q + x * (x * X - d) / (Rational(2) * q);
        }
        TorsorPoint P{origin_.t + x, y / Rational(H_.C())};
        if (!H_.contains(P)) throw Error("torsor map inverse left the curve at " + R.str());
        return P;
    }

private:
    QuarticTorsor H_;
    TorsorPoint origin_;
    Rational q_[5];  // coefficients of C G(t0 + x)
    Rational y0_;
    bool branch_ = false;
    Rational a1_, a2_, a3_, a4_, a6_, b2_;
    std::optional<WeierstrassCurve> curve_;
};

inline TorsorMap to_weierstrass_with_point(const QuarticTorsor& H, const TorsorPoint& origin) { return {H, origin}; }

/// P + Q in the group structure on the torsor with the map's origin as zero.
inline TorsorPoint transported_add(const TorsorMap& map, const TorsorPoint& P, const TorsorPoint& Q) {
    return map.backward(add(map.curve(), map.forward(P), map.forward(Q)));
}

namespace detail {

/// Visits torsor points with t = l/m, gcd(l, m) = 1, m >= 1 in canonical
/// order up to height `bound`: by height, denominator of t, |t|, positive t
/// first, then s. `visit` returns false to stop.
template <class Visit>
void for_each_torsor_point_by_height(const QuarticTorsor& H, std::uint64_t bound, Visit&& visit) {
    const auto& G = H.G();
    const bool integral = G.integral();
    const Integer& C = H.C();
    std::vector<Rational> ts;
    for (std::uint64_t h = 1; h <= bound; ++h) {
        ts.clear();
        const long long hh = static_cast<long long>(h);
        const Integer den(static_cast<unsigned long>(h));
        for (long long l = -hh; l <= hh; ++l)
            if (std::gcd(static_cast<std::uint64_t>(l < 0 ? -l : l), h) == 1)
                ts.push_back(make_rational(Integer(static_cast<long>(l)), den));
        for (std::uint64_t m = 1; m < h; ++m)
            if (std::gcd(h, m) == 1)
                for (long long l : {-hh, hh})
                    ts.push_back(make_rational(Integer(static_cast<long>(l)), Integer(static_cast<unsigned long>(m))));
        std::sort(ts.begin(), ts.end(), [](const Rational& x, const Rational& y) {
            if (x.get_den() != y.get_den()) return x.get_den() < y.get_den();
            int c = cmp(abs(x), abs(y));
            return c != 0 ? c < 0 : x > y;
        });
        for (const auto& t : ts) {
            std::optional<Rational> s;
            const Integer &l = t.get_num(), &m = t.get_den();
            if (integral) {
                Integer l2 = l * l, m2 = m * m;
                Integer val = G.a.get_num() * l2 * l2 + G.c.get_num() * l2 * m2 + G.d.get_num() * l * m2 * m +
                              G.e.get_num() * m2 * m2;
                if (!mpz_divisible_p(val.get_mpz_t(), C.get_mpz_t())) continue;
                Integer k = val / C;
                if (!is_perfect_square(k)) continue;
                s = make_rational(isqrt(k), m2);
            } else {
                s = rational_sqrt(Rational(G(t) / Rational(C)));
                if (!s) continue;
            }
            if (*s == 0) {
                if (!visit(TorsorPoint{t, *s})) return;
            } else {
                if (!visit(TorsorPoint{t, -*s})) return;
                if (!visit(TorsorPoint{t, *s})) return;
            }
        }
    }
}

}  // namespace detail

/// All torsor points with t = l/m, |l|, m <= height_bound.
inline std::vector<TorsorPoint> search_torsor_points(const QuarticTorsor& H, std::uint64_t height_bound) {
    if (height_bound < 1) throw InvalidArgument("height bound must be positive");
    std::vector<TorsorPoint> out;
    detail::for_each_torsor_point_by_height(H, height_bound, [&](const TorsorPoint& P) {
        out.push_back(P);
        return true;
    });
    return out;
}

/// First torsor point with s >= 0 in canonical order.
inline std::optional<TorsorPoint> find_torsor_point(const QuarticTorsor& H, std::uint64_t height_bound) {
    std::optional<TorsorPoint> found;
    detail::for_each_torsor_point_by_height(H, height_bound, [&](const TorsorPoint& P) {
        if (sgn(P.s) >= 0) {
            found = P;
            return false;
        }
        return true;
    });
    return found;
}

}  // namespace csk3
