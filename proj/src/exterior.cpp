#include "stabfold/exterior.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace stabfold {

namespace {

using u128 = unsigned __int128;

u128 pow128(uint64_t b, unsigned e)
{
    u128 r = 1;
    while (e--) r *= b;
    return r;
}

} // namespace

Grading internal_grading(int n, uint64_t p)
{
    Grading g;
    u128 mod = 2 * (pow128(p, n) - 1);
    g.modulus = static_cast<uint64_t>(mod);
    g.slot_value.resize(n * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            u128 v = 2 * (pow128(p, i) - 1) * pow128(p, j);
            g.slot_value[slot_of(i, j, n)] = static_cast<uint64_t>(v % mod);
        }
    return g;
}

Grading reduced_grading(int n, uint64_t p)
{
    Grading g;
    u128 mod = (pow128(p, n) - 1) / (p - 1);
    g.modulus = static_cast<uint64_t>(mod);
    g.slot_value.resize(n * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            u128 v = pow128(p, j) * ((pow128(p, i) - 1) / (p - 1));
            g.slot_value[slot_of(i, j, n)] = static_cast<uint64_t>(v % mod);
        }
    return g;
}

uint64_t internal_degree(Mono m, int n, uint64_t p) { return internal_grading(n, p).of(m); }

uint64_t reduced_internal_degree(Mono m, int n, uint64_t p) { return reduced_grading(n, p).of(m); }

std::vector<int> angle_bracket(Mono m, int n)
{
    std::vector<int> a(n, 0);
    while (m) {
        int s = std::countr_zero(m);
        m &= m - 1;
        int i = slot_i(s, n), j = slot_j(s, n);
        a[j - 1] -= 1;
        a[normalize_j(i + j, n) - 1] += 1;
    }
    return a;
}

int first_subscript_weight(Mono m, int n)
{
    int w = 0;
    while (m) {
        w += slot_i(std::countr_zero(m), n);
        m &= m - 1;
    }
    return w;
}

int first_subscript_sum(Mono m, int n) { return first_subscript_weight(m, n) % n; }

std::string format_mono(Mono m, int n)
{
    if (m == 0) return "1";
    std::string out;
    while (m) {
        int s = std::countr_zero(m);
        m &= m - 1;
        out += "h[" + std::to_string(slot_i(s, n)) + "," + std::to_string(slot_j(s, n)) + "]";
    }
    return out;
}

Wedge parse_mono_signed(const std::string& text, int n)
{
    Mono m = 0;
    int sign = 1;
    size_t k = 0;
    auto skip = [&] {
        while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    };
    skip();
    if (text.substr(k) == "1") return {1, 0};
    while (k < text.size()) {
        skip();
        if (k >= text.size()) break;
        if (text[k] != 'h') throw std::invalid_argument("bad monomial: " + text);
        ++k;
        if (k >= text.size() || text[k] != '[') throw std::invalid_argument("bad monomial: " + text);
        size_t close = text.find(']', k);
        if (close == std::string::npos) throw std::invalid_argument("bad monomial: " + text);
        std::string inner = text.substr(k + 1, close - k - 1);
        size_t comma = inner.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("bad monomial: " + text);
        int i = std::stoi(inner.substr(0, comma));
        int j = std::stoi(inner.substr(comma + 1));
        if (i < 1 || i > n || j < 0 || j > n) throw std::invalid_argument("index out of range: " + text);
        Wedge w = wedge(m, gen(i, j, n));
        if (w.sign == 0) throw std::invalid_argument("repeated generator: " + text);
        sign *= w.sign;
        m = w.mono;
        k = close + 1;
    }
    return {sign, m};
}

Mono parse_mono(const std::string& text, int n) { return parse_mono_signed(text, n).mono; }

// ---------------------------------------------------------------- Cochain

Cochain Cochain::of(FieldPtr F, Mono m, Elt c)
{
    Cochain z(std::move(F));
    z.add_term(m, c);
    return z;
}

Elt Cochain::coeff(Mono m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? 0 : it->second;
}

void Cochain::add_term(Mono m, Elt c)
{
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second = F_->add(it->second, c);
        if (it->second == 0) terms_.erase(it);
    }
}

Cochain& Cochain::operator+=(const Cochain& o)
{
    if (!F_) F_ = o.F_;
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Cochain Cochain::operator+(const Cochain& o) const
{
    Cochain r = *this;
    r += o;
    return r;
}

Cochain Cochain::operator-(const Cochain& o) const
{
    Cochain r = *this;
    if (!r.F_) r.F_ = o.F_;
    for (auto& [m, c] : o.terms_) r.add_term(m, r.F_->neg(c));
    return r;
}

Cochain Cochain::scaled(Elt s) const
{
    Cochain r(F_);
    if (s == 0) return r;
    for (auto& [m, c] : terms_) r.terms_.emplace(m, F_->mul(c, s));
    return r;
}

Cochain Cochain::wedge(const Cochain& o) const
{
    Cochain r(F_ ? F_ : o.F_);
    for (auto& [a, ca] : terms_)
        for (auto& [b, cb] : o.terms_) {
            Wedge w = stabfold::wedge(a, b);
            if (!w.sign) continue;
            Elt c = r.F_->mul(ca, cb);
            r.add_term(w.mono, w.sign > 0 ? c : r.F_->neg(c));
        }
    return r;
}

std::string Cochain::to_string(int n) const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (c != 1) os << F_->to_string(c) << "*";
        os << format_mono(m, n);
    }
    return os.str();
}

PolyCochain PolyCochain::of(FieldPtr F, Mono m, Elt c, unsigned xpow)
{
    PolyCochain z(F);
    z.add_term(m, Poly::monomial(F, c, xpow));
    return z;
}

Poly PolyCochain::coeff(Mono m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? Poly(F_) : it->second;
}

void PolyCochain::add_term(Mono m, const Poly& c)
{
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

PolyCochain PolyCochain::operator+(const PolyCochain& o) const
{
    PolyCochain r = *this;
    if (!r.F_) r.F_ = o.F_;
    for (auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

PolyCochain PolyCochain::operator-(const PolyCochain& o) const
{
    PolyCochain r = *this;
    if (!r.F_) r.F_ = o.F_;
    for (auto& [m, c] : o.terms_) r.add_term(m, c.scaled(r.F_->neg(1)));
    return r;
}

PolyCochain PolyCochain::scaled(const Poly& s) const
{
    PolyCochain r(F_);
    for (auto& [m, c] : terms_) r.add_term(m, c * s);
    return r;
}

PolyCochain PolyCochain::wedge(const PolyCochain& o) const
{
    PolyCochain r(F_ ? F_ : o.F_);
    for (auto& [a, ca] : terms_)
        for (auto& [b, cb] : o.terms_) {
            Wedge w = stabfold::wedge(a, b);
            if (!w.sign) continue;
            Poly c = ca * cb;
            r.add_term(w.mono, w.sign > 0 ? c : c.scaled(r.F_->neg(1)));
        }
    return r;
}

Cochain PolyCochain::evaluate(Elt e) const
{
    Cochain r(F_);
    for (auto& [m, c] : terms_) r.add_term(m, c.evaluate(e));
    return r;
}

std::string PolyCochain::to_string(int n) const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        std::string cs = c.to_string();
        if (cs != "1") os << "(" << cs << ")*";
        os << format_mono(m, n);
    }
    return os.str();
}

} // namespace stabfold
