#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace stabfold {

// Field elements are codes 0..q-1: the base-p digits of a code are the
// coordinates in the power basis of the modulus polynomial.
using Elt = uint32_t;

class Field;
using FieldPtr = std::shared_ptr<const Field>;

bool is_prime(uint64_t n);
uint64_t next_prime_above(uint64_t n);
std::vector<uint64_t> prime_factors(uint64_t n);
uint64_t ipow(uint64_t b, unsigned e);

class Field {
public:
    // Throws std::invalid_argument for non-prime p or m == 0.
    static FieldPtr create(uint64_t p, unsigned m = 1);

    uint32_t p() const { return p_; }
    unsigned m() const { return m_; }
    uint64_t size() const { return q_; }
    // Monic modulus, coefficients c_0..c_m.
    const std::vector<uint32_t>& modulus() const { return modulus_; }

    Elt zero() const { return 0; }
    Elt one() const { return 1; }
    Elt from_int(int64_t v) const;

    Elt add(Elt a, Elt b) const
    {
        if (m_ == 1) {
            uint32_t s = a + b;
            return s >= p_ ? s - p_ : s;
        }
        return add_ext(a, b);
    }
    Elt neg(Elt a) const
    {
        if (a == 0) return 0;
        if (m_ == 1) return p_ - a;
        return mul(a, minus_one_);
    }
    Elt sub(Elt a, Elt b) const { return add(a, neg(b)); }
    Elt mul(Elt a, Elt b) const
    {
        if (m_ == 1) return static_cast<Elt>(static_cast<uint64_t>(a) * b % p_);
        if (a == 0 || b == 0) return 0;
        uint64_t k = static_cast<uint64_t>(log_[a]) + log_[b];
        if (k >= q_ - 1) k -= q_ - 1;
        return exp_[k];
    }
    Elt inv(Elt a) const;
    Elt div(Elt a, Elt b) const { return mul(a, inv(b)); }
    Elt pow(Elt a, uint64_t e) const;
    // a -> a^(p^k)
    Elt frobenius(Elt a, unsigned k = 1) const;

    // Smallest code that generates the multiplicative group.
    Elt primitive_element() const { return gen_; }
    uint64_t order(Elt a) const;
    uint64_t log(Elt a) const { return log_[a]; }
    Elt exp(uint64_t k) const { return exp_[k % (q_ - 1)]; }

    std::vector<uint32_t> coeffs(Elt a) const;
    Elt from_coeffs(const std::vector<uint32_t>& c) const;
    bool in_prime_field(Elt a) const { return a < p_; }
    std::string to_string(Elt a) const;
    std::string modulus_string() const;

private:
    Field() = default;
    Elt add_ext(Elt a, Elt b) const;
    Elt mul_poly(Elt a, Elt b) const;

    uint32_t p_ = 0;
    unsigned m_ = 0;
    uint64_t q_ = 0;
    std::vector<uint32_t> modulus_;
    std::vector<uint32_t> exp_, log_;
    std::vector<int64_t> zech_; // alpha^k + 1 = alpha^zech[k], -1 when zero
    Elt gen_ = 0;
    Elt minus_one_ = 0;
};

// All x with x^n = a. Throws for a == 0.
std::vector<Elt> nth_roots(const Field& F, Elt a, uint64_t n);
// g^((q-1)/n) for the smallest primitive element g.
// Throws std::domain_error when n does not divide q - 1.
Elt primitive_root_of_unity(const Field& F, uint64_t n);

// Dense univariate polynomial over a field, lowest degree first.
class Poly {
public:
    Poly() = default;
    explicit Poly(FieldPtr F) : F_(std::move(F)) {}
    Poly(FieldPtr F, std::vector<Elt> c);
    static Poly constant(FieldPtr F, Elt c);
    static Poly monomial(FieldPtr F, Elt c, unsigned k);
    static Poly x(FieldPtr F) { return monomial(std::move(F), 1, 1); }

    const FieldPtr& field() const { return F_; }
    const std::vector<Elt>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    Elt coeff(size_t k) const { return k < c_.size() ? c_[k] : 0; }
    Elt lead() const { return c_.empty() ? 0 : c_.back(); }
    // x-adic valuation; -1 for the zero polynomial.
    int valuation() const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly scaled(Elt s) const;
    Poly shifted(unsigned k) const; // times x^k
    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return c_ != o.c_; }

    void divmod(const Poly& d, Poly& q, Poly& r) const;
    Poly mod(const Poly& d) const;
    Poly monic() const;
    Poly derivative() const;
    Elt evaluate(Elt e) const;

    std::string to_string(const std::string& var = "x") const;

private:
    void trim();
    FieldPtr F_;
    std::vector<Elt> c_;
};

Poly poly_gcd(Poly a, Poly b);
Poly poly_lcm(const Poly& a, const Poly& b);
Poly poly_powmod(const Poly& base, uint64_t e, const Poly& mod);
Elt poly_evaluate(const Poly& f, Elt e);

} // namespace stabfold
