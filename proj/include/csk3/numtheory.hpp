#pragma once

// Exact integer and rational utilities: trial-division factorization,
// squarefree classes in Q*/Q*^2, residue symbols.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csk3/error.hpp"

namespace csk3 {

using Integer = mpz_class;
using Rational = mpq_class;

/// Canonical fraction num/den; throws on a zero denominator.
inline Rational make_rational(const Integer& num, const Integer& den = 1) {
    if (den == 0) throw InvalidArgument("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Naive height max(|num|, den) of a canonical fraction.
inline Integer naive_height(const Rational& q) {
    Integer n = abs(q.get_num());
    return n > q.get_den() ? n : q.get_den();
}

inline std::string to_string(const Rational& q) { return q.get_str(); }
inline std::string to_string(const Integer& n) { return n.get_str(); }

/// 2^63, the default ceiling for |n| accepted by `factorize`.
inline Integer default_factorization_bound() {
    Integer b;
    mpz_ui_pow_ui(b.get_mpz_t(), 2, 63);
    return b;
}

struct PrimePower {
    Integer prime;
    unsigned exponent = 0;

    friend bool operator==(const PrimePower& a, const PrimePower& b) {
        return a.prime == b.prime && a.exponent == b.exponent;
    }
};

/// sign * prod p^e with strictly increasing primes.
struct Factorization {
    int sign = 1;
    std::vector<PrimePower> prime_powers;

    Integer value() const {
        Integer v = sign;
        for (const auto& pp : prime_powers) {
            Integer t;
            mpz_pow_ui(t.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent);
            v *= t;
        }
        return v;
    }

    /// Number of distinct odd primes dividing the integer.
    int odd_prime_count() const {
        int k = 0;
        for (const auto& pp : prime_powers)
            if (pp.prime != 2) ++k;
        return k;
    }

    bool squarefree() const {
        for (const auto& pp : prime_powers)
            if (pp.exponent > 1) return false;
        return true;
    }
};

namespace detail {

// Trial division of a 64-bit value, appending to `out` in increasing order.
inline void trial_divide_u64(std::uint64_t n, std::vector<PrimePower>& out) {
    auto take = [&](std::uint64_t p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.push_back({Integer(static_cast<unsigned long>(p)), e});
    };
    take(2);
    take(3);
    for (std::uint64_t p = 5; p <= n / p; p += 6) {
        take(p);
        take(p + 2);
    }
    if (n > 1) out.push_back({Integer(static_cast<unsigned long>(n)), 1});
}

inline bool fits_u64(const Integer& n) { return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64; }

inline std::uint64_t to_u64(const Integer& n) {
    std::uint64_t v = 0;
    mpz_export(&v, nullptr, -1, sizeof v, 0, 0, n.get_mpz_t());
    return v;
}

inline bool is_perfect_square(const Integer& n) { return sgn(n) >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

inline Integer isqrt(const Integer& n) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

}  // namespace detail

/// Exact factorization of a nonzero integer by trial division. Refuses
/// integers with |n| >= bound.
inline Factorization factorize(const Integer& n, const Integer& bound = default_factorization_bound()) {
    if (n == 0) throw InvalidArgument("factorize: zero has no factorization");
    Integer m = abs(n);
    if (m >= bound || !detail::fits_u64(m))
        throw FactorizationBudgetExceeded("|" + n.get_str() + "| is not below " + bound.get_str());
    Factorization f;
    f.sign = sgn(n) < 0 ? -1 : 1;
    detail::trial_divide_u64(detail::to_u64(m), f.prime_powers);
    return f;
}

inline bool is_prime(const Integer& n) {
    if (n < 2) return false;
    auto f = factorize(n);
    return f.prime_powers.size() == 1 && f.prime_powers[0].exponent == 1;
}

inline bool is_squarefree(const Integer& n) { return n != 0 && factorize(n).squarefree(); }

/// Number of odd primes dividing n (the Omega of the Selmer bound).
inline int odd_prime_count(const Integer& n) { return factorize(n).odd_prime_count(); }

/// p-adic valuation of a nonzero integer.
inline unsigned valuation(const Integer& n, const Integer& p) {
    if (n == 0) throw InvalidArgument("valuation of zero");
    Integer r = n;
    unsigned v = 0;
    while (mpz_divisible_p(r.get_mpz_t(), p.get_mpz_t())) {
        mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t());
        ++v;
    }
    return v;
}

/// A class in Q*/Q*^2, represented by its signed squarefree kernel.
struct SquarefreeClass {
    Integer representative;

    friend bool operator==(const SquarefreeClass& a, const SquarefreeClass& b) {
        return a.representative == b.representative;
    }
    friend bool operator<(const SquarefreeClass& a, const SquarefreeClass& b) {
        return a.representative < b.representative;
    }
};

/// Signed squarefree kernel of a nonzero integer.
///
/// Values below 2^63 are factored completely. Larger values are reduced by
/// trial division up to `trial_limit`; the cofactor left over must then be
/// 1, a perfect square or a prime for the kernel to be certain, otherwise
/// FactorizationBudgetExceeded is thrown. Values of the form C * k^2 with a
/// small C, as produced by quartic torsors, always resolve.
inline Integer squarefree_kernel(const Integer& n, unsigned long trial_limit = 1ul << 20) {
    if (n == 0) throw InvalidArgument("squarefree kernel of zero");
    Integer r = abs(n);
    Integer kernel = sgn(n);
    if (detail::fits_u64(r) && r < default_factorization_bound()) {
        for (const auto& pp : factorize(r).prime_powers)
            if (pp.exponent % 2) kernel *= pp.prime;
        return kernel;
    }
    if (detail::is_perfect_square(r)) return kernel;
    unsigned long p = 2;
    while (p <= trial_limit) {
        if (Integer(p) * p > r) break;
        if (mpz_divisible_ui_p(r.get_mpz_t(), p)) {
            unsigned e = 0;
            while (mpz_divisible_ui_p(r.get_mpz_t(), p)) {
                mpz_divexact_ui(r.get_mpz_t(), r.get_mpz_t(), p);
                ++e;
            }
            if (e % 2) kernel *= p;
            if (detail::is_perfect_square(r)) return kernel;
            if (detail::fits_u64(r) && r < default_factorization_bound()) {
                for (const auto& pp : factorize(r).prime_powers)
                    if (pp.exponent % 2) kernel *= pp.prime;
                return kernel;
            }
        }
        p = (p == 2) ? 3 : p + 2;
    }
    if (r == 1) return kernel;
    if (Integer(p) * p > r) return kernel * r;  // r is prime
    throw FactorizationBudgetExceeded("cofactor " + r.get_str() + " left after trial division to " +
                                      std::to_string(trial_limit));
}

/// Class of q in Q*/Q*^2: kernel of numerator * denominator, with the sign of q.
inline SquarefreeClass squarefree_class(const Rational& q) {
    if (q == 0) throw InvalidArgument("squarefree class of zero");
    Integer prod = q.get_num() * q.get_den();
    return {squarefree_kernel(prod)};
}

inline SquarefreeClass squarefree_class(const Integer& n) { return squarefree_class(Rational(n)); }

/// Exact square root of a rational, if it is a square.
inline std::optional<Rational> rational_sqrt(const Rational& q) {
    if (sgn(q) < 0) return std::nullopt;
    if (!detail::is_perfect_square(q.get_num()) || !detail::is_perfect_square(q.get_den())) return std::nullopt;
    return make_rational(detail::isqrt(q.get_num()), detail::isqrt(q.get_den()));
}

/// Positive rational fourth root, if q is a fourth power.
inline std::optional<Rational> rational_fourth_root(const Rational& q) {
    auto r = rational_sqrt(q);
    if (!r) return std::nullopt;
    return rational_sqrt(*r);
}

/// q and r lie in the same class of Q*/Q*^2. Needs no factorization.
inline bool same_square_class(const Rational& q, const Rational& r) {
    if (q == 0 || r == 0) throw InvalidArgument("square class of zero");
    return rational_sqrt(Rational(q * r)).has_value();
}

/// Jacobi symbol (a/n) for odd n >= 1.
inline int jacobi_symbol(const Integer& a, const Integer& n) {
    if (n < 1 || mpz_even_p(n.get_mpz_t()))
        throw InvalidArgument("jacobi_symbol: modulus must be odd and positive, got " + n.get_str());
    Integer x = a % n;
    if (x < 0) x += n;
    Integer m = n;
    int result = 1;
    while (x != 0) {
        while (mpz_even_p(x.get_mpz_t())) {
            x /= 2;
            unsigned long r = mpz_fdiv_ui(m.get_mpz_t(), 8);
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(x, m);
        if (mpz_fdiv_ui(x.get_mpz_t(), 4) == 3 && mpz_fdiv_ui(m.get_mpz_t(), 4) == 3) result = -result;
        x %= m;
    }
    return m == 1 ? result : 0;
}

/// a mod p lies in {x^4 mod p} for an odd prime p.
inline bool is_fourth_power_mod_p(const Integer& a, const Integer& p) {
    if (p < 3 || mpz_even_p(p.get_mpz_t()) || !is_prime(p))
        throw InvalidArgument("is_fourth_power_mod_p: " + p.get_str() + " is not an odd prime");
    Integer r = a % p;
    if (r < 0) r += p;
    if (r == 0) return true;
    // The fourth powers form the subgroup of index gcd(4, p-1) in F_p^*.
    Integer order = p - 1;
    Integer k = (mpz_fdiv_ui(order.get_mpz_t(), 4) == 0) ? 4 : 2;
    Integer e = order / k;
    Integer out;
    mpz_powm(out.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    return out == 1;
}

}  // namespace csk3
