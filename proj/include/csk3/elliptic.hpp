#pragma once

// Short Weierstrass curves over Q with exact group law, the congruent-number
// twists D y^2 = x^3 - x (and the plus family D y^2 = x^3 + x), torsion
// detection, naive point search and rank-positivity certificates.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "csk3/external_facts.hpp"
#include "csk3/numtheory.hpp"

namespace csk3 {

/// Affine point or the point at infinity.
class CurvePoint {
public:
    CurvePoint() = default;  // infinity
    CurvePoint(Rational x, Rational y) : affine_(true), x_(std::move(x)), y_(std::move(y)) {}

    static CurvePoint infinity() { return {}; }

    bool is_infinity() const { return !affine_; }
    const Rational& x() const { return x_; }
    const Rational& y() const { return y_; }

    CurvePoint operator-() const { return affine_ ? CurvePoint(x_, -y_) : CurvePoint(); }

    friend bool operator==(const CurvePoint& a, const CurvePoint& b) {
        if (a.affine_ != b.affine_) return false;
        return !a.affine_ || (a.x_ == b.x_ && a.y_ == b.y_);
    }

    std::string str() const { return affine_ ? "(" + x_.get_str() + ", " + y_.get_str() + ")" : "O"; }
    friend std::ostream& operator<<(std::ostream& os, const CurvePoint& P) { return os << P.str(); }

private:
    bool affine_ = false;
    Rational x_, y_;
};

/// y^2 = x^3 + A x + B with nonzero discriminant.
class WeierstrassCurve {
public:
    WeierstrassCurve(Rational A, Rational B) : A_(std::move(A)), B_(std::move(B)) {
        if (discriminant_core() == 0) throw InvalidArgument("singular curve: 4A^3 + 27B^2 = 0");
    }

    const Rational& A() const { return A_; }
    const Rational& B() const { return B_; }

    /// -16 (4A^3 + 27B^2)
    Rational discriminant() const { return Rational(-16) * discriminant_core(); }

    Rational rhs(const Rational& x) const { return (x * x + A_) * x + B_; }

    bool coefficients_integral() const { return A_.get_den() == 1 && B_.get_den() == 1; }

    std::string str() const { return "y^2 = x^3 + (" + A_.get_str() + ")x + (" + B_.get_str() + ")"; }

    friend bool operator==(const WeierstrassCurve& a, const WeierstrassCurve& b) {
        return a.A_ == b.A_ && a.B_ == b.B_;
    }

private:
    Rational discriminant_core() const { return Rational(4) * A_ * A_ * A_ + Rational(27) * B_ * B_; }

    Rational A_, B_;
};

inline bool on_curve(const WeierstrassCurve& E, const CurvePoint& P) {
    return P.is_infinity() || P.y() * P.y() == E.rhs(P.x());
}

namespace detail {
inline void require_on_curve(const WeierstrassCurve& E, const CurvePoint& P) {
    if (!on_curve(E, P)) throw OffCurve("point " + P.str() + " is not on " + E.str());
}
}  // namespace detail

/// Chord-and-tangent sum; both points must lie on E.
inline CurvePoint add(const WeierstrassCurve& E, const CurvePoint& P, const CurvePoint& Q) {
    detail::require_on_curve(E, P);
    detail::require_on_curve(E, Q);
    if (P.is_infinity()) return Q;
    if (Q.is_infinity()) return P;
    Rational slope;
    if (P.x() == Q.x()) {
        if (P.y() != Q.y() || P.y() == 0) return CurvePoint::infinity();
        slope = (Rational(3) * P.x() * P.x() + E.A()) / (Rational(2) * P.y());
    } else {
        slope = (Q.y() - P.y()) / (Q.x() - P.x());
    }
    Rational x3 = slope * slope - P.x() - Q.x();
    Rational y3 = slope * (P.x() - x3) - P.y();
    return {std::move(x3), std::move(y3)};
}

/// n * P by double-and-add.
inline CurvePoint scalar_mul(const WeierstrassCurve& E, long long n, const CurvePoint& P) {
    detail::require_on_curve(E, P);
    CurvePoint base = n < 0 ? -P : P;
    unsigned long long k = n < 0 ? 0ull - static_cast<unsigned long long>(n) : static_cast<unsigned long long>(n);
    CurvePoint acc;
    while (k) {
        if (k & 1) acc = add(E, acc, base);
        k >>= 1;
        if (k) base = add(E, base, base);
    }
    return acc;
}

/// Order of P if it is torsion, nullopt otherwise. Over Q torsion orders
/// are at most 12 (Mazur), so checking n <= 12 decides the question.
inline std::optional<int> torsion_test(const WeierstrassCurve& E, const CurvePoint& P) {
    detail::require_on_curve(E, P);
    CurvePoint acc;
    for (int n = 1; n <= 12; ++n) {
        acc = add(E, acc, P);
        if (acc.is_infinity()) return n;
    }
    return std::nullopt;
}

/// Rational points of order dividing 2, the identity excluded, sorted by x.
inline std::vector<CurvePoint> rational_two_torsion(const WeierstrassCurve& E) {
    std::vector<CurvePoint> out;
    if (E.B() == 0) {
        out.emplace_back(Rational(0), Rational(0));
        if (auto r = rational_sqrt(Rational(-E.A()))) {
            out.emplace_back(-*r, Rational(0));
            out.emplace_back(*r, Rational(0));
        }
    } else {
        // Rational roots of x^3 + A x + B. Scale x = u / L with L the lcm of
        // the denominators to get a monic integral cubic in u.
        Integer L;
        mpz_lcm(L.get_mpz_t(), E.A().get_den().get_mpz_t(), E.B().get_den().get_mpz_t());
        Rational a1 = E.A() * L * L, b1 = E.B() * L * L * L;
        const Integer& c = b1.get_num();
        std::vector<Integer> divisors{1};
        for (const auto& pp : factorize(c).prime_powers) {
            std::size_t n = divisors.size();
            Integer pk = 1;
            for (unsigned e = 1; e <= pp.exponent; ++e) {
                pk *= pp.prime;
                for (std::size_t i = 0; i < n; ++i) divisors.push_back(divisors[i] * pk);
            }
        }
        for (const auto& dv : divisors)
            for (int s : {-1, 1}) {
                Integer u = dv * s;
                if (u * u * u + a1.get_num() * u + c == 0) out.emplace_back(make_rational(u, L), Rational(0));
            }
    }
    std::sort(out.begin(), out.end(), [](const CurvePoint& p, const CurvePoint& q) { return p.x() < q.x(); });
    return out;
}

/// A rational scale lambda with A2 = lambda^4 A1 and B2 = lambda^6 B1, i.e. an
/// isomorphism (x, y) -> (lambda^2 x, lambda^3 y) from E1 to E2.
inline std::optional<Rational> isomorphism_scale(const WeierstrassCurve& E1, const WeierstrassCurve& E2) {
    if ((E1.A() == 0) != (E2.A() == 0) || (E1.B() == 0) != (E2.B() == 0)) return std::nullopt;
    std::optional<Rational> lambda;
    if (E1.A() != 0) {
        Rational q = E2.A() / E1.A();  // lambda^4
        auto r2 = rational_sqrt(q);
        if (!r2) return std::nullopt;
        auto r = rational_sqrt(*r2);
        if (!r) return std::nullopt;
        lambda = *r;
    }
    if (E1.B() != 0) {
        Rational q = E2.B() / E1.B();
        if (lambda) {
            for (Rational cand : {*lambda, Rational(-*lambda)})
                if (cand * cand * cand * cand * cand * cand == q) return cand;
            return std::nullopt;
        }
        // lambda is a rational sixth root of q.
        Integer n, d;
        if (sgn(q) < 0) return std::nullopt;
        mpz_root(n.get_mpz_t(), q.get_num().get_mpz_t(), 6);
        mpz_root(d.get_mpz_t(), q.get_den().get_mpz_t(), 6);
        Rational cand = make_rational(n, d);
        if (cand * cand * cand * cand * cand * cand == q) return cand;
        return std::nullopt;
    }
    return lambda;
}

inline CurvePoint apply_scale(const Rational& lambda, const CurvePoint& P) {
    if (P.is_infinity()) return P;
    Rational l2 = lambda * lambda;
    return {P.x() * l2, P.y() * l2 * lambda};
}

// ---------------------------------------------------------------------------
// Quadratic twists of y^2 = x^3 - x and y^2 = x^3 + x

enum class TwistFamily {
    Congruent,  // D y^2 = x^3 - x
    Plus,       // D y^2 = x^3 + x
};

inline const char* to_string(TwistFamily f) { return f == TwistFamily::Congruent ? "x^3-x" : "x^3+x"; }

/// The twist D y^2 = x^3 -+ x by a squarefree D.
class TwistedCurve {
public:
    TwistedCurve(Integer D, TwistFamily family = TwistFamily::Congruent) : D_(std::move(D)), family_(family) {
        if (D_ == 0 || !is_squarefree(D_)) throw InvalidArgument("twist parameter " + D_.get_str() + " is not squarefree");
    }

    const Integer& D() const { return D_; }
    TwistFamily family() const { return family_; }
    int sign() const { return family_ == TwistFamily::Congruent ? -1 : 1; }

    /// y^2 = x^3 -+ D^2 x
    WeierstrassCurve normalized() const { return {Rational(sign() * D_ * D_), Rational(0)}; }

    /// D y^2 = x^3 -+ x, exactly.
    bool contains(const CurvePoint& P) const {
        return P.is_infinity() || Rational(D_) * P.y() * P.y() == P.x() * P.x() * P.x() + sign() * P.x();
    }

    std::string str() const {
        return D_.get_str() + " y^2 = " + (family_ == TwistFamily::Congruent ? "x^3 - x" : "x^3 + x");
    }

    friend bool operator==(const TwistedCurve& a, const TwistedCurve& b) {
        return a.D_ == b.D_ && a.family_ == b.family_;
    }

private:
    Integer D_;
    TwistFamily family_;
};

inline bool on_curve(const TwistedCurve& E, const CurvePoint& P) { return E.contains(P); }

/// (x, y) -> (D x, D^2 y) from D y^2 = x^3 -+ x onto y^2 = x^3 -+ D^2 x.
inline CurvePoint normalize_twist(const TwistedCurve& E, const CurvePoint& P) {
    if (!E.contains(P)) throw OffCurve("point " + P.str() + " is not on " + E.str());
    if (P.is_infinity()) return P;
    Rational D(E.D());
    return {P.x() * D, P.y() * D * D};
}

/// Inverse of normalize_twist.
inline CurvePoint denormalize_twist(const TwistedCurve& E, const CurvePoint& P) {
    detail::require_on_curve(E.normalized(), P);
    if (P.is_infinity()) return P;
    Rational D(E.D());
    return {P.x() / D, P.y() / (D * D)};
}

/// Twist class D of a curve y^2 = x^3 + A x isomorphic over Q to
/// y^2 = x^3 -+ D^2 x, if there is one (A = -+ D^2 u^4).
inline std::optional<TwistedCurve> twist_family_member(const WeierstrassCurve& E) {
    if (E.B() != 0) return std::nullopt;
    TwistFamily family = sgn(E.A()) < 0 ? TwistFamily::Congruent : TwistFamily::Plus;
    Rational K = abs(E.A());
    // K = D^2 u^4 forces K to be a square with sqrt(K) = D u^2.
    auto root = rational_sqrt(K);
    if (!root) return std::nullopt;
    SquarefreeClass cls = squarefree_class(*root);
    TwistedCurve tc(cls.representative, family);
    if (!isomorphism_scale(tc.normalized(), E)) return std::nullopt;
    return tc;
}

// ---------------------------------------------------------------------------
// Naive search

namespace detail {

/// Visits affine points with x = m / e^2 (gcd(m, e) = 1) in canonical order
/// of (height, x, y), height = max(|m|, e^2) <= bound. Points on
/// y^2 = cubic over Q have square x-denominators once A, B are integral, so
/// nothing is missed for integral models. `visit` returns false to stop.
template <class Visit>
void for_each_point_by_height(const WeierstrassCurve& E, std::uint64_t bound, Visit&& visit) {
    const bool integral = E.coefficients_integral();
    const Integer A = E.A().get_num(), B = E.B().get_num();
    std::vector<std::pair<Rational, Integer>> candidates;  // (x, e)
    for (std::uint64_t h = 1; h <= bound; ++h) {
        candidates.clear();
        for (std::uint64_t e = 1; e * e <= h; ++e) {
            auto push = [&](long long m) {
                if (std::gcd(static_cast<std::uint64_t>(m < 0 ? -m : m), e) != 1) return;
                candidates.emplace_back(make_rational(Integer(static_cast<long>(m)), Integer(static_cast<unsigned long>(e * e))),
                                        Integer(static_cast<unsigned long>(e)));
            };
            const long long hh = static_cast<long long>(h);
            if (e * e == h) {
                for (long long m = -hh; m <= hh; ++m) push(m);
            } else {
                push(-hh);
                push(hh);
            }
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [x, e] : candidates) {
            std::optional<Rational> y;
            if (integral) {
                const Integer& m = x.get_num();
                Integer e2 = e * e, e4 = e2 * e2;
                Integer n = m * m * m + A * m * e4 + B * e4 * e2;
                if (!is_perfect_square(n)) continue;
                y = make_rational(isqrt(n), e2 * e);
            } else {
                y = rational_sqrt(E.rhs(x));
                if (!y) continue;
            }
            if (*y == 0) {
                if (!visit(CurvePoint(x, *y))) return;
            } else {
                if (!visit(CurvePoint(x, -*y))) return;
                if (!visit(CurvePoint(x, *y))) return;
            }
        }
    }
}

}  // namespace detail

/// Every affine point of height at most `height_bound`, in canonical
/// (height, x, y) order.
inline std::vector<CurvePoint> search_points(const WeierstrassCurve& E, std::uint64_t height_bound) {
    if (height_bound < 1) throw InvalidArgument("height bound must be positive");
    std::vector<CurvePoint> out;
    detail::for_each_point_by_height(E, height_bound, [&](const CurvePoint& P) {
        out.push_back(P);
        return true;
    });
    return out;
}

/// First non-torsion point with y > 0 in canonical order.
inline std::optional<CurvePoint> find_nontorsion_point(const WeierstrassCurve& E, std::uint64_t height_bound) {
    std::optional<CurvePoint> found;
    detail::for_each_point_by_height(E, height_bound, [&](const CurvePoint& P) {
        if (sgn(P.y()) > 0 && !torsion_test(E, P)) {
            found = P;
            return false;
        }
        return true;
    });
    return found;
}

// ---------------------------------------------------------------------------
// Certificates

struct Provenance {
    enum class Kind {
        SearchFound,   // naive search on the curve itself
        TorsorImage,   // image of a searched torsor point under an exact map
        ExternalFact,  // curated table entry, never re-derived
    };
    Kind kind = Kind::SearchFound;
    std::uint64_t height_bound = 0;  // search budget for the two search kinds
    std::string citation;            // ExternalFact only

    bool search_based() const { return kind != Kind::ExternalFact; }
};

inline const char* to_string(Provenance::Kind k) {
    switch (k) {
        case Provenance::Kind::SearchFound: return "search";
        case Provenance::Kind::TorsorImage: return "torsor-image";
        case Provenance::Kind::ExternalFact: return "external-fact";
    }
    return "?";
}

/// Evidence that rank(E^D(Q)) > 0. Search-based certificates carry a
/// non-torsion witness on the normalized model y^2 = x^3 -+ D^2 x.
struct RankPositivityCertificate {
    TwistedCurve curve;
    std::optional<CurvePoint> witness;
    Provenance provenance;
    int claimed_rank = 1;  // lower bound for search kinds, exact for facts

    bool verify() const {
        if (!provenance.search_based()) return !provenance.citation.empty() && claimed_rank > 0;
        if (!witness) return false;
        auto E = curve.normalized();
        return on_curve(E, *witness) && !witness->is_infinity() && !torsion_test(E, *witness);
    }
};

/// Search y^2 = x^3 -+ D^2 x for a non-torsion point. When `facts` is given
/// and the search is inconclusive, a positive-rank table entry for D is used
/// instead, flagged as an external fact.
inline std::optional<RankPositivityCertificate> certify_positive_rank(const Integer& D, TwistFamily family,
                                                                      std::uint64_t height_bound,
                                                                      const ExternalFactTable* facts = nullptr) {
    TwistedCurve tc(D, family);
    if (auto P = find_nontorsion_point(tc.normalized(), height_bound))
        return RankPositivityCertificate{tc, *P, {Provenance::Kind::SearchFound, height_bound, {}}, 1};
    if (facts && family == TwistFamily::Congruent)
        if (auto fact = facts->lookup(abs(D)); fact && fact->claimed_rank > 0 && sgn(D) > 0)
            return RankPositivityCertificate{tc, std::nullopt, {Provenance::Kind::ExternalFact, 0, fact->citation},
                                             fact->claimed_rank};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// 2-descent images on y^2 = x(x - D)(x + D)

namespace detail {

/// Parity vector of a nonzero rational over the basis {-1, primes...}.
/// Throws if q has a prime outside the basis to an odd power.
inline std::uint64_t class_vector(const Rational& q, const std::vector<Integer>& primes) {
    std::uint64_t v = sgn(q) < 0 ? 1u : 0u;
    Integer rest = abs(q.get_num() * q.get_den());
    for (std::size_t i = 0; i < primes.size(); ++i) {
        unsigned e = 0;
        while (mpz_divisible_p(rest.get_mpz_t(), primes[i].get_mpz_t())) {
            mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), primes[i].get_mpz_t());
            ++e;
        }
        if (e % 2) v |= std::uint64_t{1} << (i + 1);
    }
    if (!is_perfect_square(rest)) throw Error("descent image outside the expected Selmer support");
    return v;
}

inline int f2_rank(std::vector<std::uint64_t> rows) {
    int rank = 0;
    for (int bit = 63; bit >= 0; --bit) {
        std::uint64_t mask = std::uint64_t{1} << bit;
        auto pivot = std::find_if(rows.begin() + rank, rows.end(), [&](std::uint64_t r) { return r & mask; });
        if (pivot == rows.end()) continue;
        std::iter_swap(rows.begin() + rank, pivot);
        for (auto it = rows.begin(); it != rows.end(); ++it)
            if (it != rows.begin() + rank && (*it & mask)) *it ^= rows[rank];
        ++rank;
    }
    return rank;
}

}  // namespace detail

/// Image of P under the 2-descent map E(Q) -> (Q*/Q*^2)^2,
/// P -> ([x], [x - D]) on y^2 = x^3 - D^2 x, as parity vectors.
inline std::pair<std::uint64_t, std::uint64_t> descent_image(const Integer& D, const CurvePoint& P,
                                                             const std::vector<Integer>& basis_primes) {
    const Rational d(D);
    if (P.is_infinity()) return {0, 0};
    const Rational& x = P.x();
    Rational first = x, second = x - d;
    // At the 2-torsion points use the product of the other two factors.
    if (x == 0) first = (x - d) * (x + d);
    if (x == d) second = x * (x + d);
    return {detail::class_vector(first, basis_primes), detail::class_vector(second, basis_primes)};
}

/// Lower bound on rank(E^D(Q)) from the F_2-span of the descent images of
/// the given points modulo the image of rational 2-torsion. Exact: the map
/// is injective on E(Q)/2E(Q).
inline int descent_rank_lower_bound(const Integer& D, const std::vector<CurvePoint>& points) {
    TwistedCurve tc(D, TwistFamily::Congruent);
    std::vector<Integer> basis{2};
    for (const auto& pp : factorize(D).prime_powers)
        if (pp.prime != 2) basis.push_back(pp.prime);
    auto E = tc.normalized();
    auto pack = [&](const CurvePoint& P) {
        detail::require_on_curve(E, P);
        auto [a, b] = descent_image(D, P, basis);
        return a | (b << 32);
    };
    std::vector<std::uint64_t> rows;
    for (const auto& T : rational_two_torsion(E)) rows.push_back(pack(T));
    const int torsion_dim = detail::f2_rank(rows);
    for (const auto& P : points) rows.push_back(pack(P));
    return detail::f2_rank(rows) - torsion_dim;
}

}  // namespace csk3
