#pragma once

// Arithmetic criteria for the torsors C s^2 = 1 + a^2 t^4 and the
// congruent-number twists E^D: local solubility (two sufficient/iff criteria
// and a brute-force p-adic oracle), root numbers, the 2*Omega + 2 Selmer
// bound, the rank condition that trivializes H_1^C, families with known
// positive rank, the 2-isogeny with kernel (0,0), and the fibre-prime
// congruence for l^4 + m^4.

#include <array>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "csk3/elliptic.hpp"
#include "csk3/quartic.hpp"

namespace csk3 {

// ---------------------------------------------------------------------------
// Local solubility

enum class Solubility { Soluble, Insoluble, GuaranteedSoluble, Unknown };

inline const char* to_string(Solubility s) {
    switch (s) {
        case Solubility::Soluble: return "Soluble";
        case Solubility::Insoluble: return "Insoluble";
        case Solubility::GuaranteedSoluble: return "GuaranteedSoluble";
        case Solubility::Unknown: return "Unknown";
    }
    return "?";
}

struct SolubilityVerdict {
    Solubility kind;
    std::string criterion;
};

namespace detail {
inline Factorization factor_positive_squarefree(const Integer& C, const char* what) {
    if (C < 1) throw InvalidArgument(std::string(what) + ": C must be positive, got " + C.get_str());
    auto f = factorize(C);
    if (!f.squarefree()) throw InvalidArgument(std::string(what) + ": " + C.get_str() + " is not squarefree");
    return f;
}
}  // namespace detail

/// H_1^C : C s^2 = 1 + t^4 is everywhere locally soluble iff every odd
/// prime factor of C is 1 mod 8.
inline SolubilityVerdict solubility_a1(const Integer& C) {
    auto f = detail::factor_positive_squarefree(C, "solubility_a1");
    for (const auto& pp : f.prime_powers)
        if (pp.prime != 2 && mpz_fdiv_ui(pp.prime.get_mpz_t(), 8) != 1)
            return {Solubility::Insoluble, "a=1: odd prime " + pp.prime.get_str() + " is not 1 mod 8"};
    return {Solubility::Soluble, "a=1: every odd prime dividing C is 1 mod 8"};
}

/// Sufficient criterion for H_2^C : C s^2 = 1 + 4 t^4: C = 5 mod 8 and -4 is
/// a fourth power modulo every p | C. Never reports insolubility.
inline SolubilityVerdict solubility_a2(const Integer& C) {
    auto f = detail::factor_positive_squarefree(C, "solubility_a2");
    if (mpz_fdiv_ui(C.get_mpz_t(), 8) != 5) return {Solubility::Unknown, "a=2: C is not 5 mod 8"};
    for (const auto& pp : f.prime_powers)
        if (!is_fourth_power_mod_p(Integer(-4), pp.prime))
            return {Solubility::Unknown, "a=2: -4 is not a fourth power mod " + pp.prime.get_str()};
    return {Solubility::GuaranteedSoluble, "a=2: C = 5 mod 8 and -4 is a fourth power mod every p | C"};
}

/// A place of Q: a prime or the real place.
struct Place {
    std::optional<Integer> prime;

    static Place real() { return {}; }
    static Place at(Integer p) { return {std::move(p)}; }
    bool is_real() const { return !prime; }
    std::string str() const { return prime ? prime->get_str() : "inf"; }
};

namespace detail {

using IntQuartic = std::array<Integer, 5>;  // low degree first

inline IntQuartic taylor_at(const IntQuartic& h, const Integer& x0) {
    IntQuartic out = h;
    for (int i = 0; i < 5; ++i)
        for (int j = 3; j >= i; --j) out[j] += x0 * out[j + 1];
    return out;
}

inline Integer ipow(const Integer& b, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

/// Does h(t) lie in Q_p^2 (zero included) for some t in x0 + p^n Z_p?
///
/// Writing t = x0 + p^n u, h(t) = sum b_k u^k. When every b_k (k >= 1) has
/// valuation beyond v(b_0) by 1 (p odd) or 3 (p = 2), h is p^v(b0) times a
/// unit of fixed square class on the whole disc and the question is decided;
/// Hensel's lemma detects a root in the disc; otherwise the disc is split.
inline bool zp_disc_soluble(const IntQuartic& h, const Integer& p, const Integer& x0, unsigned n, unsigned depth) {
    const IntQuartic t = taylor_at(h, x0);
    const Integer pn = ipow(p, n);
    std::array<Integer, 5> b;
    Integer scale = 1;
    for (int k = 0; k < 5; ++k) {
        b[k] = t[k] * scale;
        scale *= pn;
    }
    if (b[0] == 0) return true;
    const unsigned v0 = valuation(b[0], p);
    std::optional<unsigned> w;
    for (int k = 1; k < 5; ++k)
        if (b[k] != 0) {
            unsigned vk = valuation(b[k], p);
            if (!w || vk < *w) w = vk;
        }
    const unsigned margin = (p == 2) ? 3 : 1;
    if (!w || v0 + margin <= *w) {
        if (v0 % 2) return false;
        Integer unit = b[0] / ipow(p, v0);
        if (p == 2) return mpz_fdiv_ui(unit.get_mpz_t(), 8) == 1;
        return jacobi_symbol(unit, p) == 1;
    }
    if (t[1] != 0) {
        const unsigned vf = valuation(t[0], p), vd = valuation(t[1], p);
        if (vf > 2 * vd && vf - vd >= n) return true;
    }
    if (depth == 0)
        throw PrecisionExceeded("p-adic solubility at p = " + p.get_str() + " undecided at depth limit");
    for (Integer r = 0; r < p; ++r)
        if (zp_disc_soluble(h, p, x0 + r * pn, n + 1, depth - 1)) return true;
    return false;
}

}  // namespace detail

/// Exhaustive local solubility of C s^2 = G(t) at one place, projective
/// points included. At a prime the search refines residue discs of t modulo
/// p^k up to `precision` levels and answers only when the square class of
/// C G(t) is constant on a disc or Hensel produces a root, so a returned
/// value is a proof; PrecisionExceeded is thrown when the depth runs out.
inline bool brute_local_solubility(const QuarticTorsor& H, const Place& place, unsigned precision = 24) {
    if (precision < 1) throw InvalidArgument("precision must be positive");
    const auto& G = H.G();
    if (place.is_real()) {
        if (sgn(H.C()) * sgn(G.a) > 0) return true;
        return G.as_polynomial().real_root_count() > 0;
    }
    const Integer& p = *place.prime;
    if (!is_prime(p)) throw InvalidArgument(p.get_str() + " is not prime");
    // (C L s)^2 = C L^2 G(t), integral.
    Integer L = 1;
    for (const Rational* q : {&G.a, &G.c, &G.d, &G.e}) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), q->get_den().get_mpz_t());
    const Rational k = Rational(H.C()) * L * L;
    detail::IntQuartic h{Rational(k * G.e).get_num(), Rational(k * G.d).get_num(), Rational(k * G.c).get_num(), Integer(0),
                         Rational(k * G.a).get_num()};
    // t in Z_p, then t = 1/u with u in p Z_p.
    if (detail::zp_disc_soluble(h, p, 0, 0, precision)) return true;
    detail::IntQuartic rev{h[4], h[3], h[2], h[1], h[0]};
    return detail::zp_disc_soluble(rev, p, 0, 1, precision);
}

/// Places where C s^2 = G(t) can fail to have local points: the real place,
/// primes dividing 2 C, the coefficient denominators and 4 I^3 - J^2. At all
/// other primes the curve has good reduction and hence points.
inline std::vector<Place> bad_places(const QuarticTorsor& H) {
    auto inv = invariants(H.G());
    Rational disc = Rational(4) * inv.I * inv.I * inv.I - inv.J * inv.J;
    Integer N = 2 * H.C() * disc.get_num() * disc.get_den();
    for (const Rational* q : {&H.G().a, &H.G().c, &H.G().d, &H.G().e}) N *= q->get_den();
    std::vector<Place> out{Place::real()};
    for (const auto& pp : factorize(N).prime_powers) out.push_back(Place::at(pp.prime));
    return out;
}

// ---------------------------------------------------------------------------
// Root numbers and Selmer bounds

/// Root number of E^D for squarefree D >= 1: +1 if D = 1,2,3 mod 8, -1 if
/// D = 5,6,7 mod 8.
inline int root_number(const Integer& D) {
    detail::factor_positive_squarefree(D, "root_number");
    switch (mpz_fdiv_ui(D.get_mpz_t(), 8)) {
        case 1:
        case 2:
        case 3: return 1;
        default: return -1;
    }
}

/// dim Sel^2(Q, E^n) <= 2 Omega(n) + 2, Omega counting odd prime divisors.
inline int selmer_upper_bound(const Integer& n) {
    return 2 * detail::factor_positive_squarefree(n, "selmer_upper_bound").odd_prime_count() + 2;
}

/// Bookkeeping for E^D: the Selmer bound against what certificates prove.
struct SelmerLedger {
    Integer D;
    int omega = 0;
    int upper_bound = 2;     // 2 Omega(D) + 2
    int rank_lower_bound = 0;
    std::optional<ExternalFact> external_rank;
    std::vector<std::string> notes;

    /// rank + dim E[2](Q) <= dim Sel^2, with dim E[2](Q) = 2.
    bool consistent() const {
        if (rank_lower_bound + 2 > upper_bound) return false;
        return !external_rank || external_rank->claimed_rank + 2 <= upper_bound;
    }
};

/// Ledger for E^D from the certificates gathered for it. Independent search
/// witnesses raise the rank lower bound through their 2-descent images.
inline SelmerLedger make_selmer_ledger(const Integer& D, const std::vector<RankPositivityCertificate>& certs) {
    SelmerLedger ledger;
    ledger.D = D;
    ledger.upper_bound = selmer_upper_bound(D);
    ledger.omega = (ledger.upper_bound - 2) / 2;
    std::vector<CurvePoint> witnesses;
    for (const auto& cert : certs) {
        if (cert.curve.D() != D || cert.curve.family() != TwistFamily::Congruent)
            throw InvalidArgument("certificate for " + cert.curve.str() + " filed under D = " + D.get_str());
        if (!cert.verify()) throw Error("certificate for " + cert.curve.str() + " does not verify");
        if (cert.provenance.search_based())
            witnesses.push_back(*cert.witness);
        else
            ledger.external_rank = ExternalFact{D, cert.claimed_rank, cert.provenance.citation};
    }
    if (!witnesses.empty()) ledger.rank_lower_bound = std::max(1, descent_rank_lower_bound(D, witnesses));
    if (ledger.rank_lower_bound > 0 && root_number(D) == 1)
        ledger.notes.push_back("root number +1 with a non-torsion point: parity suggests even rank >= 2 (conjectural)");
    if (ledger.rank_lower_bound == 0 && root_number(D) == -1)
        ledger.notes.push_back("root number -1: parity suggests odd rank (conjectural)");
    return ledger;
}

enum class StarStar { Holds, Fails, Inconclusive };

inline const char* to_string(StarStar s) {
    switch (s) {
        case StarStar::Holds: return "Holds";
        case StarStar::Fails: return "Fails";
        case StarStar::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct RankEvidence {
    int lower_bound = 0;
    std::optional<ExternalFact> external;
};

struct StarStarResult {
    StarStar verdict = StarStar::Inconclusive;
    SelmerLedger ledger;                  // for E^{2C}
    std::vector<std::string> conclusions;
};

/// Checks rank(E^{2C}) = 2 Omega(C) for C satisfying the a=1 solubility
/// criterion. A supplied external rank decides directly; a lower bound from
/// search decides once it reaches 2 Omega(C), since the Selmer bound caps
/// the rank at that value.
inline StarStarResult star_star_verdict(const Integer& C, const RankEvidence& evidence) {
    StarStarResult out;
    auto sol = solubility_a1(C);
    const Integer D = squarefree_kernel(2 * C);
    out.ledger.D = D;
    out.ledger.upper_bound = selmer_upper_bound(D);
    out.ledger.omega = (out.ledger.upper_bound - 2) / 2;
    out.ledger.rank_lower_bound = evidence.lower_bound;
    out.ledger.external_rank = evidence.external;
    if (!out.ledger.consistent())
        throw Error("rank evidence for E^" + D.get_str() + " exceeds the Selmer bound " +
                    std::to_string(out.ledger.upper_bound));
    if (sol.kind == Solubility::Insoluble) {
        out.verdict = StarStar::Fails;
        out.conclusions.push_back(sol.criterion);
        return out;
    }
    const int target = 2 * out.ledger.omega;
    if (evidence.external) {
        out.verdict = evidence.external->claimed_rank == target ? StarStar::Holds : StarStar::Fails;
        out.ledger.notes.push_back("rank taken from external fact: " + evidence.external->citation);
    } else if (evidence.lower_bound >= target) {
        out.verdict = StarStar::Holds;
        out.ledger.notes.push_back("rank squeezed between search lower bound and Selmer upper bound");
    }
    if (out.verdict == StarStar::Holds) {
        out.conclusions.push_back("dim Sel^2(E^" + D.get_str() + ") = " + std::to_string(out.ledger.upper_bound));
        out.conclusions.push_back("Sha(E^" + D.get_str() + ")[2] = 0");
        out.conclusions.push_back("H_1^" + C.get_str() + " is isomorphic to E^" + D.get_str() +
                                  " and has infinitely many rational points");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Families with unconditional positive rank

struct ExpectedRank {
    bool positive = false;
    std::string citation;
};

/// Primes p = 5, 7 mod 8, and pq or 2pq with p = 5 mod 8 and q = 3, 7 mod 8
/// (Monsky, Cor. 5.15) have rank(E^D(Q)) > 0.
inline ExpectedRank expected_rank_family(const Integer& D) {
    auto f = detail::factor_positive_squarefree(D, "expected_rank_family");
    auto mod8 = [](const Integer& p) { return mpz_fdiv_ui(p.get_mpz_t(), 8); };
    std::vector<Integer> odd;
    bool even = false;
    for (const auto& pp : f.prime_powers) {
        if (pp.prime == 2)
            even = true;
        else
            odd.push_back(pp.prime);
    }
    if (!even && odd.size() == 1 && (mod8(odd[0]) == 5 || mod8(odd[0]) == 7))
        return {true, "Monsky Cor. 5.15: primes = 5,7 mod 8 are congruent"};
    if (odd.size() == 2) {
        for (int i = 0; i < 2; ++i) {
            const Integer &p = odd[i], &q = odd[1 - i];
            // Odd pq with q = 7 mod 8 is excluded: Tunnell's criterion rules out
            // 35, 91, 115, ... unconditionally.
            if (mod8(p) == 5 && mod8(q) == 3)
                return {true, std::string("Monsky Cor. 5.15: ") + (even ? "2pq" : "pq") +
                                  " with p = 5 mod 8, q = 3 mod 8"};
            if (even && mod8(p) == 5 && mod8(q) == 7)
                return {true, "Monsky Cor. 5.15: 2pq with p = 5 mod 8, q = 7 mod 8"};
        }
    }
    return {false, {}};
}

// ---------------------------------------------------------------------------
// 2-isogeny y^2 = x^3 - D^2 x  ->  y^2 = x^3 + 4 D^2 x with kernel {O, (0,0)}

inline WeierstrassCurve two_isogeny_codomain(const Integer& D) { return {Rational(4 * D * D), Rational(0)}; }

/// (x, y) -> (y^2 / x^2, -y (D^2 + x^2) / x^2); the kernel maps to O.
inline CurvePoint two_isogeny_image(const Integer& D, const CurvePoint& P) {
    const WeierstrassCurve E{Rational(-D * D), Rational(0)};
    detail::require_on_curve(E, P);
    if (P.is_infinity() || P.x() == 0) return CurvePoint::infinity();
    const Rational x2 = P.x() * P.x();
    return {P.y() * P.y() / x2, -P.y() * (Rational(D * D) + x2) / x2};
}

// ---------------------------------------------------------------------------

/// Every odd prime dividing l^4 + m^4 (gcd(l, m) = 1) is 1 mod 8. Returns
/// false only if that fails, which would indicate an arithmetic fault.
inline bool fiber_prime_check(const Integer& l, const Integer& m) {
    if (l == 0 && m == 0) throw InvalidArgument("fiber_prime_check: (0, 0)");
    Integer g;
    mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), m.get_mpz_t());
    if (g != 1) throw InvalidArgument("fiber_prime_check: l and m are not coprime");
    const Integer n = l * l * l * l + m * m * m * m;
    for (const auto& pp : factorize(n).prime_powers)
        if (pp.prime != 2 && mpz_fdiv_ui(pp.prime.get_mpz_t(), 8) != 1) return false;
    return true;
}

}  // namespace csk3
