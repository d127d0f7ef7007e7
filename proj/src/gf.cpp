#include "stabfold/gf.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace stabfold {

bool is_prime(uint64_t n)
{
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

uint64_t next_prime_above(uint64_t n)
{
    uint64_t k = n + 1;
    while (!is_prime(k)) ++k;
    return k;
}

std::vector<uint64_t> prime_factors(uint64_t n)
{
    std::vector<uint64_t> out;
    for (uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

uint64_t ipow(uint64_t b, unsigned e)
{
    uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

namespace {

// Polynomials over GF(p) as raw coefficient vectors, used only while
// searching for the modulus.
using RawPoly = std::vector<uint64_t>;

void raw_trim(RawPoly& f)
{
    while (!f.empty() && f.back() == 0) f.pop_back();
}

uint64_t inv_mod(uint64_t a, uint64_t p)
{
    uint64_t r = 1, e = p - 2;
    a %= p;
    while (e) {
        if (e & 1) r = r * a % p;
        a = a * a % p;
        e >>= 1;
    }
    return r;
}

RawPoly raw_mod(RawPoly a, const RawPoly& m, uint64_t p)
{
    raw_trim(a);
    uint64_t li = inv_mod(m.back(), p);
    while (a.size() >= m.size()) {
        uint64_t c = a.back() * li % p;
        size_t sh = a.size() - m.size();
        for (size_t k = 0; k < m.size(); ++k)
            a[sh + k] = (a[sh + k] + p - c * m[k] % p) % p;
        raw_trim(a);
    }
    return a;
}

RawPoly raw_mulmod(const RawPoly& a, const RawPoly& b, const RawPoly& m, uint64_t p)
{
    if (a.empty() || b.empty()) return {};
    RawPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return raw_mod(r, m, p);
}

RawPoly raw_gcd(RawPoly a, RawPoly b, uint64_t p)
{
    raw_trim(a);
    raw_trim(b);
    while (!b.empty()) {
        RawPoly r = raw_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// Ben-Or: f of degree m is irreducible iff gcd(x^(p^i) - x, f) = 1 for i <= m/2.
bool raw_irreducible(const RawPoly& f, uint64_t p)
{
    size_t m = f.size() - 1;
    if (m == 1) return true;
    if (f[0] == 0) return false;
    RawPoly xp = {0, 1};
    for (size_t i = 1; i <= m / 2; ++i) {
        RawPoly acc = {1};
        RawPoly base = xp;
        uint64_t e = p;
        while (e) {
            if (e & 1) acc = raw_mulmod(acc, base, f, p);
            base = raw_mulmod(base, base, f, p);
            e >>= 1;
        }
        xp = acc;
        RawPoly t = xp;
        if (t.size() < 2) t.resize(2, 0);
        t[1] = (t[1] + p - 1) % p;
        raw_trim(t);
        RawPoly g = raw_gcd(f, t, p);
        if (g.size() > 1) return false;
    }
    return true;
}

constexpr uint64_t kMaxTable = uint64_t(1) << 24;

} // namespace

FieldPtr Field::create(uint64_t p, unsigned m)
{
    if (!is_prime(p)) throw std::invalid_argument("field characteristic must be prime");
    if (m == 0) throw std::invalid_argument("extension degree must be positive");
    if (p > 0xFFFFFFFFull) throw std::invalid_argument("characteristic too large");
    uint64_t q = 1;
    for (unsigned k = 0; k < m; ++k) {
        q *= p;
        if (q > kMaxTable && m > 1) throw std::invalid_argument("field too large for table arithmetic");
    }
    std::shared_ptr<Field> F(new Field());
    F->p_ = static_cast<uint32_t>(p);
    F->m_ = m;
    F->q_ = q;

    if (m == 1) {
        F->modulus_ = {0, 1};
    } else {
        // Lexicographic order on (c_{m-1}, ..., c_0): code order with c_{m-1} most significant.
        for (uint64_t code = 0; code < q; ++code) {
            RawPoly f(m + 1, 0);
            uint64_t c = code;
            for (unsigned k = 0; k < m; ++k) {
                f[k] = c % p;
                c /= p;
            }
            f[m] = 1;
            if (raw_irreducible(f, p)) {
                F->modulus_.assign(f.begin(), f.end());
                break;
            }
        }
        if (F->modulus_.empty()) throw std::logic_error("no irreducible polynomial found");
    }

    if (q <= kMaxTable) {
        std::vector<uint64_t> ell = prime_factors(q - 1);
        auto slow_pow = [&](Elt a, uint64_t e) {
            Elt r = 1;
            while (e) {
                if (e & 1) r = F->mul_poly(r, a);
                a = F->mul_poly(a, a);
                e >>= 1;
            }
            return r;
        };
        for (Elt g = 1; g < q; ++g) {
            bool ok = true;
            for (uint64_t l : ell)
                if (slow_pow(g, (q - 1) / l) == 1) {
                    ok = false;
                    break;
                }
            if (ok) {
                F->gen_ = g;
                break;
            }
        }
        if (q == 2) F->gen_ = 1;
        F->exp_.assign(q - 1, 0);
        F->log_.assign(q, 0);
        Elt cur = 1;
        for (uint64_t k = 0; k < q - 1; ++k) {
            F->exp_[k] = cur;
            F->log_[cur] = static_cast<uint32_t>(k);
            cur = F->mul_poly(cur, F->gen_);
        }
        if (m > 1) {
            F->zech_.assign(q - 1, -1);
            for (uint64_t k = 0; k < q - 1; ++k) {
                Elt a = F->exp_[k];
                Elt d0 = a % F->p_;
                Elt b = a - d0 + (d0 + 1) % F->p_;
                F->zech_[k] = b == 0 ? -1 : static_cast<int64_t>(F->log_[b]);
            }
        }
        F->minus_one_ = F->from_int(-1);
    } else {
        F->minus_one_ = static_cast<Elt>(p - 1);
    }
    return F;
}

Elt Field::mul_poly(Elt a, Elt b) const
{
    if (m_ == 1) return static_cast<Elt>(static_cast<uint64_t>(a) * b % p_);
    std::vector<uint64_t> x(m_), y(m_), r(2 * m_ - 1, 0);
    for (unsigned k = 0; k < m_; ++k) {
        x[k] = a % p_;
        a /= p_;
        y[k] = b % p_;
        b /= p_;
    }
    for (unsigned i = 0; i < m_; ++i)
        for (unsigned j = 0; j < m_; ++j) r[i + j] = (r[i + j] + x[i] * y[j]) % p_;
    for (size_t k = r.size(); k-- > m_;) {
        uint64_t c = r[k];
        if (!c) continue;
        for (unsigned t = 0; t <= m_; ++t)
            r[k - m_ + t] = (r[k - m_ + t] + p_ - c * modulus_[t] % p_) % p_;
    }
    Elt out = 0;
    for (unsigned k = m_; k-- > 0;) out = out * p_ + static_cast<Elt>(r[k]);
    return out;
}

Elt Field::add_ext(Elt a, Elt b) const
{
    if (a == 0) return b;
    if (b == 0) return a;
    uint64_t la = log_[a], lb = log_[b];
    uint64_t d = lb >= la ? lb - la : lb + (q_ - 1) - la;
    int64_t z = zech_[d];
    if (z < 0) return 0;
    uint64_t k = la + static_cast<uint64_t>(z);
    if (k >= q_ - 1) k -= q_ - 1;
    return exp_[k];
}

Elt Field::from_int(int64_t v) const
{
    int64_t r = v % static_cast<int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<Elt>(r);
}

Elt Field::inv(Elt a) const
{
    if (a == 0) throw std::domain_error("inverse of zero");
    if (!log_.empty()) {
        uint64_t l = log_[a];
        return exp_[l == 0 ? 0 : q_ - 1 - l];
    }
    return pow(a, q_ - 2);
}

Elt Field::pow(Elt a, uint64_t e) const
{
    if (e == 0) return 1;
    if (a == 0) return 0;
    if (!log_.empty()) {
        unsigned __int128 k = static_cast<unsigned __int128>(log_[a]) * (e % (q_ - 1));
        return exp_[static_cast<uint64_t>(k % (q_ - 1))];
    }
    Elt r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Elt Field::frobenius(Elt a, unsigned k) const
{
    for (unsigned t = 0; t < k % m_; ++t) a = pow(a, p_);
    return a;
}

uint64_t Field::order(Elt a) const
{
    if (a == 0) throw std::domain_error("zero has no multiplicative order");
    uint64_t n = q_ - 1;
    for (uint64_t l : prime_factors(q_ - 1))
        while (n % l == 0 && pow(a, n / l) == 1) n /= l;
    return n;
}

std::vector<uint32_t> Field::coeffs(Elt a) const
{
    std::vector<uint32_t> c(m_);
    for (unsigned k = 0; k < m_; ++k) {
        c[k] = a % p_;
        a /= p_;
    }
    return c;
}

Elt Field::from_coeffs(const std::vector<uint32_t>& c) const
{
    Elt out = 0;
    for (size_t k = std::min<size_t>(c.size(), m_); k-- > 0;) out = out * p_ + c[k] % p_;
    return out;
}

std::string Field::to_string(Elt a) const
{
    if (m_ == 1) return std::to_string(a);
    auto c = coeffs(a);
    std::ostringstream os;
    bool first = true;
    for (size_t k = c.size(); k-- > 0;) {
        if (!c[k]) continue;
        if (!first) os << "+";
        first = false;
        if (k == 0 || c[k] != 1) os << c[k];
        if (k >= 1) os << "t";
        if (k >= 2) os << "^" << k;
    }
    if (first) os << "0";
    return os.str();
}

std::string Field::modulus_string() const
{
    std::ostringstream os;
    bool first = true;
    for (size_t k = modulus_.size(); k-- > 0;) {
        if (!modulus_[k]) continue;
        if (!first) os << "+";
        first = false;
        if (k == 0 || modulus_[k] != 1) os << modulus_[k];
        if (k >= 1) os << "t";
        if (k >= 2) os << "^" << k;
    }
    return os.str();
}

std::vector<Elt> nth_roots(const Field& F, Elt a, uint64_t n)
{
    if (a == 0) throw std::invalid_argument("nth_roots of zero");
    if (n == 0) throw std::invalid_argument("nth_roots with n = 0");
    uint64_t N = F.size() - 1;
    uint64_t k = F.log(a);
    uint64_t g = std::gcd(n, N);
    std::vector<Elt> out;
    if (k % g != 0) return out;
    // x = alpha^e with n e = k mod N; solutions form a coset of the order-g subgroup.
    uint64_t Ng = N / g, ng = (n / g) % Ng, kg = k / g;
    uint64_t e0 = 0;
    if (Ng > 1) {
        // inverse of ng modulo Ng
        int64_t t = 0, nt = 1, r = static_cast<int64_t>(Ng), nr = static_cast<int64_t>(ng);
        while (nr) {
            int64_t qt = r / nr;
            std::tie(t, nt) = std::make_pair(nt, t - qt * nt);
            std::tie(r, nr) = std::make_pair(nr, r - qt * nr);
        }
        if (t < 0) t += static_cast<int64_t>(Ng);
        e0 = static_cast<uint64_t>((static_cast<unsigned __int128>(kg) * static_cast<uint64_t>(t)) % Ng);
    }
    for (uint64_t c = 0; c < g; ++c) out.push_back(F.exp((e0 + c * Ng) % N));
    std::sort(out.begin(), out.end());
    return out;
}

Elt primitive_root_of_unity(const Field& F, uint64_t n)
{
    if (n == 0 || (F.size() - 1) % n != 0)
        throw std::domain_error("root not present; extend the field");
    return F.pow(F.primitive_element(), (F.size() - 1) / n);
}

// ---------------------------------------------------------------- Poly

Poly::Poly(FieldPtr F, std::vector<Elt> c) : F_(std::move(F)), c_(std::move(c)) { trim(); }

Poly Poly::constant(FieldPtr F, Elt c) { return Poly(std::move(F), std::vector<Elt>{c}); }

Poly Poly::monomial(FieldPtr F, Elt c, unsigned k)
{
    std::vector<Elt> v(k + 1, 0);
    v[k] = c;
    return Poly(std::move(F), std::move(v));
}

void Poly::trim()
{
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

int Poly::valuation() const
{
    for (size_t k = 0; k < c_.size(); ++k)
        if (c_[k]) return static_cast<int>(k);
    return -1;
}

Poly Poly::operator+(const Poly& o) const
{
    const FieldPtr& F = F_ ? F_ : o.F_;
    std::vector<Elt> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t k = 0; k < r.size(); ++k) r[k] = F->add(coeff(k), o.coeff(k));
    return Poly(F, std::move(r));
}

Poly Poly::operator-(const Poly& o) const
{
    const FieldPtr& F = F_ ? F_ : o.F_;
    std::vector<Elt> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t k = 0; k < r.size(); ++k) r[k] = F->sub(coeff(k), o.coeff(k));
    return Poly(F, std::move(r));
}

Poly Poly::operator*(const Poly& o) const
{
    const FieldPtr& F = F_ ? F_ : o.F_;
    if (c_.empty() || o.c_.empty()) return Poly(F);
    std::vector<Elt> r(c_.size() + o.c_.size() - 1, 0);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (!c_[i]) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] = F->add(r[i + j], F->mul(c_[i], o.c_[j]));
    }
    return Poly(F, std::move(r));
}

Poly Poly::scaled(Elt s) const
{
    std::vector<Elt> r(c_.size());
    for (size_t k = 0; k < c_.size(); ++k) r[k] = F_->mul(c_[k], s);
    return Poly(F_, std::move(r));
}

Poly Poly::shifted(unsigned k) const
{
    if (c_.empty()) return *this;
    std::vector<Elt> r(k, 0);
    r.insert(r.end(), c_.begin(), c_.end());
    return Poly(F_, std::move(r));
}

void Poly::divmod(const Poly& d, Poly& q, Poly& r) const
{
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    const FieldPtr& F = F_ ? F_ : d.F_;
    std::vector<Elt> rem = c_;
    std::vector<Elt> quo(c_.size() >= d.c_.size() ? c_.size() - d.c_.size() + 1 : 0, 0);
    Elt li = F->inv(d.lead());
    while (!rem.empty() && rem.size() >= d.c_.size()) {
        Elt c = F->mul(rem.back(), li);
        size_t sh = rem.size() - d.c_.size();
        quo[sh] = c;
        for (size_t k = 0; k < d.c_.size(); ++k) rem[sh + k] = F->sub(rem[sh + k], F->mul(c, d.c_[k]));
        while (!rem.empty() && rem.back() == 0) rem.pop_back();
    }
    q = Poly(F, std::move(quo));
    r = Poly(F, std::move(rem));
}

Poly Poly::mod(const Poly& d) const
{
    Poly q, r;
    divmod(d, q, r);
    return r;
}

Poly Poly::monic() const
{
    if (c_.empty()) return *this;
    return scaled(F_->inv(lead()));
}

Poly Poly::derivative() const
{
    if (c_.size() <= 1) return Poly(F_);
    std::vector<Elt> r(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) r[k - 1] = F_->mul(c_[k], F_->from_int(static_cast<int64_t>(k)));
    return Poly(F_, std::move(r));
}

Elt Poly::evaluate(Elt e) const
{
    Elt r = 0;
    for (size_t k = c_.size(); k-- > 0;) r = F_->add(F_->mul(r, e), c_[k]);
    return r;
}

std::string Poly::to_string(const std::string& var) const
{
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t k = c_.size(); k-- > 0;) {
        if (!c_[k]) continue;
        if (!first) os << " + ";
        first = false;
        bool unit = c_[k] == 1;
        if (!unit || k == 0) os << F_->to_string(c_[k]);
        if (k >= 1) os << (unit ? "" : "*") << var;
        if (k >= 2) os << "^" << k;
    }
    return os.str();
}

Poly poly_gcd(Poly a, Poly b)
{
    while (!b.is_zero()) {
        Poly r = a.mod(b);
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

Poly poly_lcm(const Poly& a, const Poly& b)
{
    if (a.is_zero() || b.is_zero()) return Poly(a.field() ? a.field() : b.field());
    Poly g = poly_gcd(a, b);
    Poly q, r;
    (a * b).divmod(g, q, r);
    return q.monic();
}

Poly poly_powmod(const Poly& base, uint64_t e, const Poly& mod)
{
    Poly r = Poly::constant(mod.field(), 1).mod(mod);
    Poly b = base.mod(mod);
    while (e) {
        if (e & 1) r = (r * b).mod(mod);
        b = (b * b).mod(mod);
        e >>= 1;
    }
    return r;
}

Elt poly_evaluate(const Poly& f, Elt e)
{
    if (f.is_zero()) return 0;
    return f.evaluate(e);
}

} // namespace stabfold
