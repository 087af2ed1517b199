#include <gtest/gtest.h>

#include <random>

#include "csk3/numtheory.hpp"

using namespace csk3;

TEST(Rational, CanonicalForm) {
    Rational q = make_rational(6, -4);
    EXPECT_EQ(q.get_num(), -3);
    EXPECT_EQ(q.get_den(), 2);
    Rational z = make_rational(0, 7);
    EXPECT_EQ(z.get_num(), 0);
    EXPECT_EQ(z.get_den(), 1);
    EXPECT_THROW(make_rational(1, 0), InvalidArgument);
    EXPECT_EQ(naive_height(make_rational(-21, 5)), 21);
}

TEST(Factorize, Examples) {
    auto one = factorize(1);
    EXPECT_EQ(one.sign, 1);
    EXPECT_TRUE(one.prime_powers.empty());

    auto f = factorize(119);
    EXPECT_EQ(f.sign, 1);
    ASSERT_EQ(f.prime_powers.size(), 2u);
    EXPECT_EQ(f.prime_powers[0], (PrimePower{7, 1}));
    EXPECT_EQ(f.prime_powers[1], (PrimePower{17, 1}));

    auto g = factorize(-1296);
    EXPECT_EQ(g.sign, -1);
    ASSERT_EQ(g.prime_powers.size(), 2u);
    EXPECT_EQ(g.prime_powers[0], (PrimePower{2, 4}));
    EXPECT_EQ(g.prime_powers[1], (PrimePower{3, 4}));
}

TEST(Factorize, Errors) {
    EXPECT_THROW(factorize(0), InvalidArgument);
    Integer big;
    mpz_ui_pow_ui(big.get_mpz_t(), 2, 64);
    EXPECT_THROW(factorize(big), FactorizationBudgetExceeded);
    EXPECT_THROW(factorize(1000, 999), FactorizationBudgetExceeded);
}

TEST(Factorize, LargePrimeBelowBound) {
    // 2^61 - 1 is prime.
    Integer m61;
    mpz_ui_pow_ui(m61.get_mpz_t(), 2, 61);
    m61 -= 1;
    auto f = factorize(m61);
    ASSERT_EQ(f.prime_powers.size(), 1u);
    EXPECT_EQ(f.prime_powers[0].prime, m61);
    EXPECT_TRUE(is_prime(m61));
}

TEST(Factorize, RoundtripMillion) {
    for (long n = -1000000; n <= 1000000; ++n) {
        if (n == 0) continue;
        auto f = factorize(Integer(n));
        ASSERT_EQ(f.value(), n) << n;
        for (std::size_t i = 1; i < f.prime_powers.size(); ++i)
            ASSERT_LT(f.prime_powers[i - 1].prime, f.prime_powers[i].prime);
    }
}

TEST(Factorize, OmegaAndSquarefree) {
    EXPECT_EQ(odd_prime_count(105), 3);
    EXPECT_EQ(odd_prime_count(34), 1);
    EXPECT_EQ(odd_prime_count(1), 0);
    EXPECT_TRUE(is_squarefree(-30));
    EXPECT_FALSE(is_squarefree(12));
    EXPECT_FALSE(is_squarefree(0));
    EXPECT_EQ(valuation(48, 2), 4u);
    EXPECT_EQ(valuation(-250, 5), 3u);
}

TEST(SquarefreeClass, Examples) {
    EXPECT_EQ(squarefree_class(Rational(18)).representative, 2);
    EXPECT_EQ(squarefree_class(make_rational(48, 125)).representative, 15);
    EXPECT_EQ(squarefree_class(Rational(-50)).representative, -2);
    EXPECT_EQ(squarefree_class(Rational(1)).representative, 1);
    EXPECT_THROW(squarefree_class(Rational(0)), InvalidArgument);
}

TEST(SquarefreeClass, KernelAboveFactorizationBound) {
    // 3 * (2^61 - 1)^2 * 5^2: the cofactor after trial division is a square.
    Integer m61;
    mpz_ui_pow_ui(m61.get_mpz_t(), 2, 61);
    m61 -= 1;
    EXPECT_EQ(squarefree_kernel(Integer(75) * m61 * m61), 3);
    EXPECT_EQ(squarefree_kernel(Integer(12) * m61), 3 * m61);
}

TEST(SquarefreeClass, InvariantUnderSquares) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> dist(-5000, 5000);
    auto nonzero = [&] {
        long v;
        do v = dist(rng);
        while (v == 0);
        return v;
    };
    for (int i = 0; i < 10000; ++i) {
        Rational q = make_rational(nonzero(), std::abs(nonzero()));
        Rational r = make_rational(nonzero(), std::abs(nonzero()));
        ASSERT_EQ(squarefree_class(q * r * r), squarefree_class(q)) << q << " " << r;
    }
}

TEST(SquarefreeClass, RationalRoots) {
    EXPECT_EQ(*rational_sqrt(make_rational(9, 4)), make_rational(3, 2));
    EXPECT_FALSE(rational_sqrt(Rational(-4)));
    EXPECT_FALSE(rational_sqrt(Rational(2)));
    EXPECT_EQ(*rational_fourth_root(make_rational(16, 81)), make_rational(2, 3));
    EXPECT_FALSE(rational_fourth_root(Rational(4)));
    EXPECT_TRUE(same_square_class(Rational(20), Rational(5)));
    EXPECT_FALSE(same_square_class(Rational(-5), Rational(5)));
}

TEST(Jacobi, Examples) {
    EXPECT_EQ(jacobi_symbol(1, 15), 1);
    EXPECT_EQ(jacobi_symbol(2, 5), -1);
    EXPECT_EQ(jacobi_symbol(2, 7), 1);
    EXPECT_EQ(jacobi_symbol(0, 1), 1);
    EXPECT_EQ(jacobi_symbol(6, 9), 0);
    EXPECT_EQ(jacobi_symbol(-1, 7), -1);
    EXPECT_THROW(jacobi_symbol(3, 8), InvalidArgument);
    EXPECT_THROW(jacobi_symbol(3, -5), InvalidArgument);
}

TEST(Jacobi, MatchesEulerCriterion) {
    for (long p = 3; p < 1000; p += 2) {
        if (!is_prime(p)) continue;
        for (long a = 0; a < p; ++a) {
            Integer r;
            mpz_powm_ui(r.get_mpz_t(), Integer(a).get_mpz_t(), (p - 1) / 2, Integer(p).get_mpz_t());
            int euler = r == 0 ? 0 : (r == 1 ? 1 : -1);
            ASSERT_EQ(jacobi_symbol(a, p), euler) << a << " mod " << p;
        }
    }
}

TEST(FourthPower, Examples) {
    EXPECT_TRUE(is_fourth_power_mod_p(-4, 5));
    EXPECT_TRUE(is_fourth_power_mod_p(-4, 13));
    EXPECT_FALSE(is_fourth_power_mod_p(2, 5));
    EXPECT_FALSE(is_fourth_power_mod_p(-4, 3));
    EXPECT_THROW(is_fourth_power_mod_p(1, 15), InvalidArgument);
    EXPECT_THROW(is_fourth_power_mod_p(1, 2), InvalidArgument);
}

TEST(FourthPower, MatchesEnumeration) {
    for (long p = 3; p < 1000; p += 2) {
        if (!is_prime(p)) continue;
        std::vector<bool> fourth(p, false);
        for (long x = 0; x < p; ++x) fourth[(x * x % p) * (x * x % p) % p] = true;
        for (long a = 0; a < p; ++a) ASSERT_EQ(is_fourth_power_mod_p(a, p), fourth[a]) << a << " mod " << p;
        ASSERT_EQ(is_fourth_power_mod_p(-p - 1, p), fourth[p - 1]);
    }
}
