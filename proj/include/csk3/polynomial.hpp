#pragma once

#include <algorithm>
#include <vector>

#include "csk3/numtheory.hpp"

namespace csk3 {

/// Dense univariate polynomial over Q, coefficients stored low degree first.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : Rational(0); }
    Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

    Rational operator()(const Rational& x) const {
        Rational acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Polynomial derivative() const {
        std::vector<Rational> d;
        for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * static_cast<long>(k));
        return Polynomial(std::move(d));
    }

    /// Coefficients of p(x0 + x).
    Polynomial shifted(const Rational& x0) const {
        std::vector<Rational> out(c_.begin(), c_.end());
        const int n = static_cast<int>(out.size());
        // Repeated synthetic division by (x - x0).
        for (int i = 0; i < n; ++i)
            for (int j = n - 2; j >= i; --j) out[j] += x0 * out[j + 1];
        return Polynomial(std::move(out));
    }

    Polynomial operator-() const {
        std::vector<Rational> out(c_);
        for (auto& v : out) v = -v;
        return Polynomial(std::move(out));
    }

    /// Remainder of division by a nonzero divisor.
    Polynomial remainder(const Polynomial& divisor) const {
        std::vector<Rational> r(c_);
        const int dd = divisor.degree();
        const Rational lead = divisor.leading();
        for (int k = static_cast<int>(r.size()) - 1; k >= dd; --k) {
            if (r[k] == 0) continue;
            Rational f = r[k] / lead;
            for (int j = 0; j <= dd; ++j) r[k - dd + j] -= f * divisor.c_[j];
        }
        r.resize(std::max(0, std::min<int>(static_cast<int>(r.size()), dd)));
        return Polynomial(std::move(r));
    }

    /// Number of distinct real roots, by a Sturm sequence.
    int real_root_count() const {
        if (degree() < 1) return 0;
        std::vector<Polynomial> seq{*this, derivative()};
        while (!seq.back().is_zero()) {
            Polynomial r = -seq[seq.size() - 2].remainder(seq.back());
            if (r.is_zero()) break;
            seq.push_back(std::move(r));
        }
        auto changes = [&](bool at_plus_infinity) {
            int count = 0;
            int last = 0;
            for (const auto& p : seq) {
                int s = sgn(p.leading());
                if (!at_plus_infinity && p.degree() % 2) s = -s;
                if (s == 0) continue;
                if (last != 0 && s != last) ++count;
                last = s;
            }
            return count;
        };
        return changes(false) - changes(true);
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Rational> c_;
};

}  // namespace csk3
