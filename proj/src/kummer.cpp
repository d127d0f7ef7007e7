#include "stabfold/kummer.hpp"

#include <numeric>
#include <stdexcept>

namespace stabfold {

std::string to_string(Flavor f)
{
    switch (f) {
    case Flavor::sigma: return "sigma";
    case Flavor::semilinear: return "semilinear";
    case Flavor::custom: return "custom";
    }
    return "?";
}

KummerConnection KummerConnection::sigma(int n)
{
    KummerConnection k;
    k.n = n;
    k.p = 0;
    k.flavor = Flavor::sigma;
    k.params.resize(n * n);
    for (int s = 0; s < n * n; ++s) k.params[s] = Rational(-slot_i(s, n), n);
    return k;
}

KummerConnection KummerConnection::semilinear(int n, uint64_t p)
{
    KummerConnection k;
    k.n = n;
    k.p = p;
    k.flavor = Flavor::semilinear;
    k.params.resize(n * n);
    const int64_t den = static_cast<int64_t>(ipow(p, n) - 1);
    for (int s = 0; s < n * n; ++s) {
        int i = slot_i(s, n), jr = slot_j(s, n);
        auto num = static_cast<int64_t>(ipow(p, jr) * (ipow(p, i) - 1));
        k.params[s] = Rational(-num, den);
    }
    return k;
}

KummerConnection KummerConnection::custom(int n, std::vector<Rational> params)
{
    if (static_cast<int>(params.size()) != n * n) throw std::invalid_argument("one parameter per generator required");
    KummerConnection k;
    k.n = n;
    k.p = 0;
    k.flavor = Flavor::custom;
    k.params = std::move(params);
    return k;
}

KummerConnection KummerConnection::from_json(const nlohmann::json& j)
{
    std::string fl = j.at("flavor").get<std::string>();
    int n = j.at("n").get<int>();
    if (n < 1 || n > kMaxHeight) throw std::invalid_argument("height out of range");
    if (fl == "sigma") return sigma(n);
    if (fl == "semilinear") return semilinear(n, j.at("p").get<uint64_t>());
    if (fl != "custom") throw std::invalid_argument("unknown flavor " + fl);
    std::vector<Rational> params(n * n, Rational(0));
    std::vector<char> seen(n * n, 0);
    for (auto& e : j.at("params")) {
        int i = e.at("i").get<int>(), jj = e.at("j").get<int>();
        if (i < 1 || i > n) throw std::invalid_argument("first subscript out of range");
        int s = slot_of(i, jj, n);
        int64_t den = e.value("den", int64_t(1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        params[s] = Rational(e.at("num").get<int64_t>(), den);
        seen[s] = 1;
    }
    for (char c : seen)
        if (!c) throw std::invalid_argument("custom connection must give every generator");
    KummerConnection k = custom(n, params);
    if (j.contains("p")) k.p = j.at("p").get<uint64_t>();
    return k;
}

nlohmann::json KummerConnection::to_json() const
{
    nlohmann::json ps = nlohmann::json::array();
    for (int s = 0; s < n * n; ++s)
        ps.push_back({{"i", slot_i(s, n)}, {"j", slot_j(s, n)}, {"num", params[s].numerator()},
                      {"den", params[s].denominator()}});
    nlohmann::json j{{"flavor", to_string(flavor)}, {"n", n}, {"params", ps}};
    if (flavor != Flavor::sigma) j["p"] = p;
    return j;
}

Rational KummerConnection::param(Mono m) const
{
    Rational r(0);
    while (m) {
        r += params[std::countr_zero(m)];
        m &= m - 1;
    }
    return r;
}

int64_t KummerConnection::denominator() const
{
    int64_t D = 1;
    for (auto& r : params) D = std::lcm(D, r.denominator());
    return D;
}

int64_t KummerConnection::exponent(Mono m) const
{
    Rational r = param(m) * Rational(denominator());
    if (r.denominator() != 1) throw std::logic_error("exponent not integral");
    return r.numerator();
}

Elt Monodromy::eigenvalue(Mono m) const
{
    int64_t e = conn.exponent(m) % D;
    if (e < 0) e += D;
    return F->pow(omega, static_cast<uint64_t>(e));
}

Cochain Monodromy::apply(const Cochain& z) const
{
    Cochain r(F);
    for (auto& [m, v] : z.terms()) r.add_term(m, F->mul(v, eigenvalue(m)));
    return r;
}

Monodromy monodromy(const KummerConnection& conn, FieldPtr F, Elt omega)
{
    Monodromy T;
    T.D = conn.denominator();
    if (omega == 0 || F->order(omega) != static_cast<uint64_t>(T.D))
        throw std::invalid_argument("omega must have order exactly " + std::to_string(T.D));
    T.omega = omega;
    T.F = std::move(F);
    T.conn = conn;
    return T;
}

bool commutes_with_d(const Monodromy& T, const Complex& fiber)
{
    for (auto& k : fiber.keys())
        for (Mono m : fiber.basis(k)) {
            Cochain dm = fiber.d(m);
            if (!(T.apply(dm) == dm.scaled(T.eigenvalue(m)))) return false;
        }
    return true;
}

std::vector<Mono> fixed_monomials(const KummerConnection& conn)
{
    std::vector<Mono> out;
    const Mono top = Mono(1) << (conn.n * conn.n);
    const int64_t D = conn.denominator();
    std::vector<int64_t> e(conn.n * conn.n);
    for (int s = 0; s < conn.n * conn.n; ++s) e[s] = conn.exponent(Mono(1) << s);
    for (Mono m = 0; m < top; ++m) {
        int64_t t = 0;
        for (Mono r = m; r; r &= r - 1) t += e[std::countr_zero(r)];
        if (t % D == 0) out.push_back(m);
    }
    return out;
}

Elt Transport::scalar(Mono m) const
{
    Elt s = 1;
    while (m) {
        s = F->mul(s, alpha[std::countr_zero(m)]);
        m &= m - 1;
    }
    return s;
}

Cochain Transport::apply(const Cochain& z) const
{
    Cochain r(F);
    for (auto& [m, v] : z.terms()) r.add_term(m, F->mul(v, scalar(m)));
    return r;
}

namespace {

Transport from_x(int n, const FieldPtr& F, Elt eps, Elt delta, std::vector<Elt> x)
{
    Transport t;
    t.n = n;
    t.F = F;
    t.eps = eps;
    t.delta = delta;
    t.alpha.assign(n * n, 1);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            Elt a = 1;
            for (int k = 0; k < i; ++k) a = F->mul(a, x[normalize_j(j + k, n) - 1]);
            t.alpha[slot_of(i, j, n)] = a;
        }
    t.x = std::move(x);
    return t;
}

Cochain fiber_d(const Dga& g, const FieldPtr& F, Elt eps, Mono m)
{
    Cochain z(F);
    g.d_mono(m, [&](int sign, int epow, Mono out) {
        Elt c = epow ? eps : 1;
        if (c) z.add_term(out, sign > 0 ? c : F->neg(c));
    });
    return z;
}

} // namespace

std::vector<Transport> solve_h_diagonal(int n, const FieldPtr& F, Elt eps, Elt delta, SolveMode mode, uint64_t q)
{
    if (eps == 0 || delta == 0) throw std::invalid_argument("transport needs nonzero fibers");
    const Field& K = *F;
    Elt ratio = K.div(delta, eps);
    std::vector<Transport> out;
    if (mode == SolveMode::sigma) {
        for (Elt r : nth_roots(K, ratio, n)) out.push_back(from_x(n, F, eps, delta, std::vector<Elt>(n, r)));
    } else if (mode == SolveMode::semilinear) {
        if (q < 2) throw std::invalid_argument("semilinear mode needs the Frobenius base q");
        uint64_t N = 0, qk = 1;
        for (int k = 0; k < n; ++k, qk *= q) N += qk;
        for (Elt r : nth_roots(K, ratio, N)) {
            if (K.pow(r, qk) != r) continue;
            std::vector<Elt> x(n);
            x[0] = r;
            for (int k = 1; k < n; ++k) x[k] = K.pow(x[k - 1], q);
            out.push_back(from_x(n, F, eps, delta, x));
        }
    } else {
        const uint64_t units = K.size() - 1;
        uint64_t count = 1;
        for (int k = 0; k + 1 < n; ++k) count *= units;
        if (count > 10'000'000) throw std::invalid_argument("too many solutions to enumerate");
        for (uint64_t c = 0; c < count; ++c) {
            std::vector<Elt> x(n);
            uint64_t r = c;
            Elt prod = 1;
            for (int k = 0; k + 1 < n; ++k) {
                x[k] = K.exp(r % units);
                r /= units;
                prod = K.mul(prod, x[k]);
            }
            x[n - 1] = K.div(ratio, prod);
            out.push_back(from_x(n, F, eps, delta, x));
        }
    }
    for (auto& t : out)
        if (!verify_transport(t)) throw std::logic_error("solution fails to commute with d");
    return out;
}

bool verify_transport(const Transport& t)
{
    Dga g = Dga::deformed(t.n);
    for (int s = 0; s < t.n * t.n; ++s) {
        Mono m = Mono(1) << s;
        if (!(t.apply(fiber_d(g, t.F, t.eps, m)) == fiber_d(g, t.F, t.delta, m).scaled(t.alpha[s]))) return false;
    }
    return true;
}

bool verify_transport_full(const Transport& t)
{
    Dga g = Dga::deformed(t.n);
    const Mono top = Mono(1) << (t.n * t.n);
    for (Mono m = 0; m < top; ++m)
        if (!(t.apply(fiber_d(g, t.F, t.eps, m)) == fiber_d(g, t.F, t.delta, m).scaled(t.scalar(m)))) return false;
    return true;
}

Transport transport_from_root(const KummerConnection& conn, const FieldPtr& F, Elt eps, Elt delta, Elt zeta)
{
    const Field& K = *F;
    if (eps == 0 || delta == 0 || zeta == 0) throw std::invalid_argument("transport needs nonzero data");
    int64_t D = conn.denominator();
    if (K.pow(zeta, static_cast<uint64_t>(D)) != K.div(eps, delta)) throw std::invalid_argument("zeta^D must equal eps/delta");
    Transport t;
    t.n = conn.n;
    t.F = F;
    t.eps = eps;
    t.delta = delta;
    t.alpha.resize(conn.n * conn.n);
    const uint64_t ord = K.order(zeta);
    for (int s = 0; s < conn.n * conn.n; ++s) {
        int64_t e = conn.exponent(Mono(1) << s) % static_cast<int64_t>(ord);
        if (e < 0) e += static_cast<int64_t>(ord);
        t.alpha[s] = K.pow(zeta, static_cast<uint64_t>(e));
    }
    return t;
}

Transport compose(const Transport& a, const Transport& b)
{
    if (a.n != b.n || a.delta != b.eps) throw std::invalid_argument("transports do not compose");
    Transport t = a;
    t.delta = b.delta;
    for (size_t s = 0; s < t.alpha.size(); ++s) t.alpha[s] = a.F->mul(a.alpha[s], b.alpha[s]);
    if (!a.x.empty() && !b.x.empty())
        for (size_t k = 0; k < t.x.size(); ++k) t.x[k] = a.F->mul(a.x[k], b.x[k]);
    else
        t.x.clear();
    return t;
}

int64_t Lattice::min_filtration() const
{
    int64_t m = 0;
    if (kind == Kind::medial)
        for (auto& [b, v] : a) m = std::min(m, -v);
    return m;
}

std::shared_ptr<const Complex> fixed_bundle(const KummerConnection& conn, const FieldPtr& F)
{
    Descriptor d;
    d.n = conn.n;
    d.p = conn.p > 1 ? conn.p : next_prime_above(2 * conn.n * conn.n);
    d.F = F;
    d.eps = EpsMode::symbolic();
    d.lie = Lie::ravenel;
    d.label = Label::custom;
    d.custom_name = "fixed-" + to_string(conn.flavor);
    return std::make_shared<const Complex>(closed_complex(d, [&conn](Mono m) { return conn.fixed(m); }));
}

namespace {

Lattice make_lattice(const KummerConnection& conn, const FieldPtr& F, Lattice::Kind kind)
{
    Lattice L;
    L.kind = kind;
    L.conn = conn;
    L.fixed = fixed_bundle(conn, F);
    for (Mono b : L.fixed->all_monomials()) {
        int64_t a = -conn.param(b).numerator();
        if (a < 0) throw std::invalid_argument("positive Kummer parameter on " + format_mono(b, conn.n));
        L.a[b] = a;
    }
    return L;
}

// Calls visit(b, b', shift) for every x-power term of d(b); stops when visit returns false.
template <class Visit>
void for_each_term(const Lattice& L, Visit&& visit)
{
    const Complex& c = *L.fixed;
    for (auto& k : c.keys())
        for (Mono b : c.basis(k)) {
            PolyCochain db = c.d_bundle(b);
            for (auto& [t, poly] : db.terms())
                for (size_t f = 0; f < poly.coeffs().size(); ++f) {
                    if (!poly.coeff(f)) continue;
                    int64_t shift = static_cast<int64_t>(f) + L.a.at(b) - L.a.at(t);
                    if (!visit(b, t, shift)) return;
                }
        }
}

} // namespace

std::optional<LatticeWitness> closure_failure(const Lattice& L)
{
    std::optional<LatticeWitness> w;
    for_each_term(L, [&](Mono b, Mono t, int64_t shift) {
        if (shift >= 0) return true;
        w = LatticeWitness{b, t, shift};
        return false;
    });
    return w;
}

Lattice core_build(const KummerConnection& conn, const FieldPtr& F)
{
    Lattice L = make_lattice(conn, F, Lattice::Kind::core);
    L.closure = closure_failure(L);
    return L;
}

Lattice medial_build(const KummerConnection& conn, const FieldPtr& F)
{
    Lattice L = make_lattice(conn, F, Lattice::Kind::medial);
    L.closure = closure_failure(L);
    return L;
}

Homogeneity core_homogeneity(const Lattice& core)
{
    Homogeneity h;
    for_each_term(core, [&](Mono b, Mono t, int64_t shift) {
        if (shift == 0) return true;
        h.holds = false;
        h.witness = LatticeWitness{b, t, shift};
        return false;
    });
    return h;
}

bool core_at_one_matches(const Lattice& core, const Complex& fiber)
{
    const Complex& c = *core.fixed;
    if (c.all_monomials() != fiber.all_monomials()) return false;
    for (Mono b : c.all_monomials())
        if (!(c.d_bundle(b).evaluate(1) == fiber.d(b))) return false;
    return true;
}

std::string format_lattice_element(const Lattice& L, Mono b, int64_t e)
{
    std::string xs = e == 0 ? "" : e == 1 ? "x" : "x^" + std::to_string(e);
    if (b == 0) return xs.empty() ? "1" : xs;
    std::string m = format_mono(b, L.conn.n);
    return xs.empty() ? m : xs + "*" + m;
}

} // namespace stabfold
