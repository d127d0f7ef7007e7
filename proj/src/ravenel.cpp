#include "stabfold/ravenel.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include "stabfold/parallel.hpp"

namespace stabfold {

std::string to_string(Lie l) { return l == Lie::gl ? "gl" : "ravenel"; }

std::string to_string(Label l)
{
    switch (l) {
    case Label::full: return "full";
    case Label::critical: return "cc";
    case Label::fsc: return "fsc";
    case Label::custom: return "custom";
    }
    return "?";
}

Dga Dga::deformed(int n)
{
    if (n < 1 || n > kMaxHeight) throw std::invalid_argument("height out of range");
    Dga g;
    g.n_ = n;
    g.gen_.resize(n * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            auto& t = g.gen_[slot_of(i, j, n)];
            for (int l = 1; l <= i - 1; ++l) t.push_back({slot_of(l, j, n), slot_of(i - l, j + l, n), 1, 0});
            for (int l = i; l <= n; ++l) t.push_back({slot_of(l, j, n), slot_of(i - l + n, j + l, n), 1, 1});
        }
    return g;
}

Dga Dga::gl(int n)
{
    if (n < 1 || n > kMaxHeight) throw std::invalid_argument("height out of range");
    Dga g;
    g.n_ = n;
    g.gen_.resize(n * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            auto& t = g.gen_[slot_of(i, j, n)];
            for (int l = 1; l <= n; ++l) {
                int i2 = ((i - l) % n + n) % n;
                if (i2 == 0) i2 = n;
                t.push_back({slot_of(l, j, n), slot_of(i2, j + l, n), 1, 0});
            }
        }
    return g;
}

struct Complex::Lazy {
    std::once_flag once;
    MatrixComplex mats;
};

Complex::Complex(Descriptor desc, Predicate keep) : desc_(std::move(desc))
{
    const int n = desc_.n;
    if (n < 1 || n > kMaxHeight) throw std::invalid_argument("height out of range");
    if (!desc_.F) throw std::invalid_argument("complex needs a coefficient field");
    dga_ = desc_.lie == Lie::gl ? Dga::gl(n) : Dga::deformed(n);
    grading_ = desc_.lie == Lie::gl ? reduced_grading(n, desc_.p) : internal_grading(n, desc_.p);
    if (n * n > 25) throw std::invalid_argument("monomial enumeration limited to n <= 5");
    const Mono top = Mono(1) << (n * n);
    for (Mono m = 0; m < top; ++m) {
        if (keep && !keep(m)) continue;
        BlockKey k{degree(m), grading_.of(m)};
        auto& b = basis_[k];
        index_.emplace(m, std::make_pair(k, static_cast<uint32_t>(b.size())));
        b.push_back(m);
        ++total_;
    }
    for (auto& [k, v] : basis_) keys_.push_back(k);
    lazy_ = std::make_shared<Lazy>();
}

std::pair<BlockKey, uint32_t> Complex::locate(Mono m) const
{
    auto it = index_.find(m);
    if (it == index_.end()) throw std::out_of_range("monomial not in complex: " + format_mono(m, n()));
    return it->second;
}

const std::vector<Mono>& Complex::basis(const BlockKey& k) const
{
    static const std::vector<Mono> empty;
    auto it = basis_.find(k);
    return it == basis_.end() ? empty : it->second;
}

std::vector<Mono> Complex::all_monomials() const
{
    std::vector<Mono> out;
    out.reserve(total_);
    for (auto& [k, v] : basis_) out.insert(out.end(), v.begin(), v.end());
    return out;
}

Cochain Complex::d(Mono m) const
{
    const Field& F = *desc_.F;
    Cochain z(desc_.F);
    Elt e = desc_.eps.eps;
    dga_.d_mono(m, [&](int sign, int epow, Mono out) {
        Elt c = epow ? e : 1;
        if (!c) return;
        z.add_term(out, sign > 0 ? c : F.neg(c));
    });
    return z;
}

Cochain Complex::d(const Cochain& z) const
{
    Cochain r(desc_.F);
    for (auto& [m, c] : z.terms()) r += d(m).scaled(c);
    return r;
}

PolyCochain Complex::d_bundle(Mono m) const
{
    const FieldPtr& F = desc_.F;
    PolyCochain z(F);
    dga_.d_mono(m, [&](int sign, int epow, Mono out) {
        z.add_term(out, Poly::monomial(F, sign > 0 ? 1 : F->neg(1), static_cast<unsigned>(epow)));
    });
    return z;
}

PolyCochain Complex::d_bundle(const PolyCochain& z) const
{
    PolyCochain r(desc_.F);
    for (auto& [m, c] : z.terms()) r = r + d_bundle(m).scaled(c);
    return r;
}

SparseMatrix Complex::block_matrix(const BlockKey& k) const
{
    const auto& src = basis(k);
    BlockKey tk{k.s + 1, k.u};
    const auto& dst = basis(tk);
    SparseMatrix M(src.size(), dst.size());
    for (size_t r = 0; r < src.size(); ++r) {
        Cochain z = d(src[r]);
        SparseRow& row = M.row[r];
        for (auto& [m, c] : z.terms()) {
            auto it = index_.find(m);
            if (it == index_.end() || it->second.first.s != tk.s || it->second.first.u != tk.u)
                throw std::logic_error("differential leaves the complex at " + format_mono(src[r], n()) + " -> " +
                                       format_mono(m, n()));
            row.emplace_back(it->second.second, c);
        }
        std::sort(row.begin(), row.end());
    }
    return M;
}

const MatrixComplex& Complex::matrices() const
{
    if (desc_.eps.bundle) throw std::logic_error("bundle complexes have no field matrices; evaluate a fiber");
    std::call_once(lazy_->once, [&] {
        MatrixComplex& mc = lazy_->mats;
        mc.F = desc_.F;
        for (auto& k : keys_) mc.dims[k] = basis(k).size();
        std::vector<SparseMatrix> out(keys_.size());
        parallel_for(keys_.size(), [&](size_t t) { out[t] = block_matrix(keys_[t]); });
        for (size_t t = 0; t < keys_.size(); ++t) mc.d[keys_[t]] = std::move(out[t]);
    });
    return lazy_->mats;
}

Complex build_deformed(int n, uint64_t p, FieldPtr F, EpsMode eps)
{
    Descriptor d;
    d.n = n;
    d.p = p;
    d.F = std::move(F);
    d.eps = eps;
    d.lie = Lie::ravenel;
    d.label = Label::full;
    return Complex(d);
}

Complex build_gl(int n, FieldPtr F, uint64_t p_for_grading)
{
    Dga a = Dga::gl(n), b = Dga::deformed(n);
    for (int s = 0; s < n * n; ++s) {
        const auto& ta = a.terms(s);
        const auto& tb = b.terms(s);
        if (ta.size() != tb.size()) throw std::logic_error("gl differential disagrees with the eps = 1 fiber");
        for (size_t k = 0; k < ta.size(); ++k)
            if (ta[k].a != tb[k].a || ta[k].b != tb[k].b || ta[k].sign != tb[k].sign)
                throw std::logic_error("gl differential disagrees with the eps = 1 fiber");
    }
    Descriptor d;
    d.n = n;
    d.p = p_for_grading;
    d.F = std::move(F);
    d.eps = EpsMode::smooth();
    d.lie = Lie::gl;
    d.label = Label::full;
    return Complex(d);
}

namespace {

void assert_closed(const Complex& c)
{
    for (auto& k : c.keys())
        for (Mono m : c.basis(k)) {
            bool ok = true;
            c.dga().d_mono(m, [&](int, int, Mono out) {
                if (!c.contains(out)) ok = false;
            });
            if (!ok) throw std::logic_error("subcomplex not closed under d at " + format_mono(m, c.n()));
        }
}

} // namespace

Complex closed_complex(Descriptor desc, Complex::Predicate keep)
{
    Complex out(std::move(desc), std::move(keep));
    assert_closed(out);
    return out;
}

Complex subcomplex(const Complex& c, Label which)
{
    Descriptor d = c.desc();
    d.label = which;
    const int n = c.n();
    Complex::Predicate keep;
    if (which == Label::critical) {
        Grading ig = internal_grading(n, d.p);
        Grading rg = reduced_grading(n, d.p);
        bool gl = d.lie == Lie::gl;
        keep = [=, &c](Mono m) {
            if (!c.contains(m)) return false;
            bool crit = ig.of(m) == 0;
            if (gl && crit != (rg.of(m) == 0)) throw std::logic_error("reduced and internal gradings disagree");
            return crit;
        };
    } else if (which == Label::fsc) {
        keep = [n, &c](Mono m) { return c.contains(m) && first_subscript_sum(m, n) == 0; };
    } else if (which == Label::full) {
        keep = [&c](Mono m) { return c.contains(m); };
    } else {
        throw std::invalid_argument("use subcomplex_custom for custom labels");
    }
    Complex out(d, keep);
    assert_closed(out);
    return out;
}

Complex subcomplex_custom(const Complex& c, const std::string& name, Complex::Predicate keep)
{
    Descriptor d = c.desc();
    d.label = Label::custom;
    d.custom_name = name;
    Complex out(d, [&](Mono m) { return c.contains(m) && keep(m); });
    assert_closed(out);
    return out;
}

namespace {

// Calls visit(m, critical, first_subscript_sum == 0) for every monomial.
template <class Visit>
void scan_all(int n, uint64_t p, Visit&& visit)
{
    if (n < 1 || n > 5) throw std::invalid_argument("monomial scan limited to n <= 5");
    Grading g = internal_grading(n, p);
    const int bits = n * n;
    const int lo = bits / 2, hi = bits - lo;
    std::vector<uint64_t> glo(size_t(1) << lo), ghi(size_t(1) << hi);
    std::vector<int> wlo(glo.size()), whi(ghi.size());
    for (size_t m = 0; m < glo.size(); ++m) {
        glo[m] = g.of(m);
        wlo[m] = first_subscript_weight(m, n);
    }
    for (size_t m = 0; m < ghi.size(); ++m) {
        ghi[m] = g.of(Mono(m) << lo);
        whi[m] = first_subscript_weight(Mono(m) << lo, n);
    }
    for (size_t h = 0; h < ghi.size(); ++h)
        for (size_t l = 0; l < glo.size(); ++l) {
            uint64_t s = glo[l] + ghi[h];
            if (s >= g.modulus) s -= g.modulus;
            visit((Mono(h) << lo) | l, s == 0, (wlo[l] + whi[h]) % n == 0);
        }
}

} // namespace

LabelCounts label_counts(int n, uint64_t p)
{
    LabelCounts c;
    scan_all(n, p, [&](Mono, bool crit, bool fsc) {
        ++c.full;
        c.critical += crit;
        c.fsc += fsc;
    });
    return c;
}

std::vector<Mono> containment_witnesses(int n, uint64_t p)
{
    std::vector<Mono> out;
    scan_all(n, p, [&](Mono m, bool crit, bool fsc) {
        if (crit && !fsc) out.push_back(m);
    });
    std::sort(out.begin(), out.end());
    return out;
}

Containment containment_report(int n, uint64_t p)
{
    Containment rep;
    int best_deg = n * n + 1;
    Mono best = 0;
    // Witness order: cohomological degree first, then bitmask.
    scan_all(n, p, [&](Mono m, bool crit, bool fsc) {
        if (!crit) return;
        ++rep.scanned;
        if (fsc) return;
        int dg = degree(m);
        if (dg < best_deg || (dg == best_deg && m < best)) {
            best_deg = dg;
            best = m;
        }
    });
    if (best_deg <= n * n) {
        rep.holds = false;
        rep.witness = best;
    }
    return rep;
}

namespace {

Mono shift_mono(Mono m, int n, int& sign)
{
    Mono out = 0;
    sign = 1;
    while (m) {
        int s = std::countr_zero(m);
        m &= m - 1;
        Wedge w = wedge(out, gen(slot_i(s, n), slot_j(s, n) + 1, n));
        sign *= w.sign;
        out = w.mono;
    }
    return out;
}

unsigned frob_power(const Complex& c)
{
    unsigned m = c.field()->m();
    int n = c.n();
    if (m % n != 0) throw std::invalid_argument("coefficient field has no order-n Frobenius power");
    return m / n;
}

} // namespace

Cochain sigma_apply(const Complex& c, const Cochain& z, bool semilinear)
{
    const Field& F = *c.field();
    unsigned k = semilinear ? frob_power(c) : 0;
    Cochain r(c.field());
    for (auto& [m, v] : z.terms()) {
        int sign;
        Mono t = shift_mono(m, c.n(), sign);
        Elt cv = semilinear ? F.frobenius(v, k) : v;
        r.add_term(t, sign > 0 ? cv : F.neg(cv));
    }
    return r;
}

PolyCochain sigma_apply(const Complex& c, const PolyCochain& z, bool semilinear)
{
    const FieldPtr& F = c.field();
    unsigned k = semilinear ? frob_power(c) : 0;
    PolyCochain r(F);
    for (auto& [m, v] : z.terms()) {
        int sign;
        Mono t = shift_mono(m, c.n(), sign);
        std::vector<Elt> cs = v.coeffs();
        if (semilinear)
            for (auto& e : cs) e = F->frobenius(e, k);
        Poly pv(F, cs);
        r.add_term(t, sign > 0 ? pv : pv.scaled(F->neg(1)));
    }
    return r;
}

} // namespace stabfold
