#include "stabfold/retract.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "stabfold/parallel.hpp"

namespace stabfold {

Cochain Derivation::operator()(const Cochain& z) const
{
    Cochain r(c->field());
    for (auto& [m, v] : z.terms()) r += apply(m).scaled(v);
    return r;
}

Derivation extend_functional(const Complex& c, std::vector<Elt> values)
{
    const int slots = c.n() * c.n();
    if (static_cast<int>(values.size()) != slots) throw std::invalid_argument("one value per generator required");
    Derivation h;
    h.c = &c;
    h.shift = -1;
    FieldPtr F = c.field();
    h.apply = [F, values = std::move(values)](Mono m) {
        Cochain r(F);
        int t = 0;
        for (Mono rest = m; rest; rest &= rest - 1, ++t) {
            int s = std::countr_zero(rest);
            Elt v = values[s];
            if (!v) continue;
            r.add_term(m & ~(Mono(1) << s), (t & 1) ? F->neg(v) : v);
        }
        return r;
    };
    return h;
}

Derivation laplacian(const Complex& c, const Derivation& h)
{
    if (h.shift != -1) throw std::invalid_argument("laplacian needs a degree -1 operator");
    Derivation D;
    D.c = &c;
    D.shift = 0;
    D.apply = [&c, h](Mono m) {
        Cochain a = c.d(h.apply(m));
        a += h(c.d(m));
        return a;
    };
    return D;
}

DenseMatrix block_operator(const Derivation& D, const BlockKey& k)
{
    const Complex& c = *D.c;
    const auto& basis = c.basis(k);
    DenseMatrix M(basis.size(), basis.size());
    for (size_t r = 0; r < basis.size(); ++r) {
        Cochain z = D.apply(basis[r]);
        for (auto& [m, v] : z.terms()) {
            auto [tk, pos] = c.locate(m);
            if (!(tk == k)) throw std::invalid_argument("operator leaves the block of " + format_mono(basis[r], c.n()));
            M.at(r, pos) = v;
        }
    }
    return M;
}

DenseMatrix degree_one_operator(const Derivation& D)
{
    const int n = D.c->n();
    const int slots = n * n;
    DenseMatrix M(slots, slots);
    for (int s = 0; s < slots; ++s) {
        Mono g = Mono(1) << s;
        if (!D.c->contains(g)) throw std::invalid_argument("degree-one operator needs every generator");
        Cochain z = D.apply(g);
        for (auto& [m, v] : z.terms()) {
            if (degree(m) != 1) throw std::invalid_argument("operator does not preserve degree one");
            M.at(s, std::countr_zero(m)) = v;
        }
    }
    return M;
}

namespace {

std::vector<Elt> roots_in_field(const Field& F, const Poly& f)
{
    std::vector<Elt> out;
    for (uint64_t e = 0; e < F.size(); ++e)
        if (f.evaluate(static_cast<Elt>(e)) == 0) out.push_back(static_cast<Elt>(e));
    return out;
}

bool is_diagonal(const DenseMatrix& M)
{
    for (size_t i = 0; i < M.rows; ++i)
        for (size_t j = 0; j < M.cols; ++j)
            if (i != j && M.at(i, j)) return false;
    return true;
}

struct IdemData {
    uint64_t a = 0; // nilpotent threshold
    uint64_t L = 1; // period
};

IdemData idem_data(const FieldPtr& Fp, const DenseMatrix& M)
{
    const Field& F = *Fp;
    IdemData r;
    if (M.rows == 0) return r;
    Poly m = minpoly(Fp, M);
    r.a = static_cast<uint64_t>(m.valuation());
    std::vector<Elt> cs(m.coeffs().begin() + r.a, m.coeffs().end());
    Poly rest(Fp, cs);
    uint64_t max_mult = 0;
    for (Elt lam : roots_in_field(F, rest)) {
        if (lam == 0) continue;
        Poly lin(Fp, {F.neg(lam), 1});
        uint64_t k = 0;
        for (;;) {
            Poly q, rem;
            rest.divmod(lin, q, rem);
            if (!rem.is_zero()) break;
            rest = q;
            ++k;
        }
        max_mult = std::max(max_mult, k);
        r.L = std::lcm(r.L, F.order(lam));
    }
    if (rest.degree() > 0) throw std::domain_error("minimal polynomial does not split over F; extend the field");
    uint64_t pe = 1;
    while (pe < max_mult) pe *= F.p();
    r.L *= pe;
    return r;
}

uint64_t exponent_from(const IdemData& d)
{
    uint64_t N = d.L;
    while (N < d.a) N += d.L;
    return N;
}

} // namespace

UProperty u_property_check(const FieldPtr& Fp, const DenseMatrix& M)
{
    UProperty u;
    if (M.rows == 0) {
        u.diagonalizable = u.all_in_k_u = true;
        return u;
    }
    Poly m = minpoly(Fp, M);
    u.eigenvalues = roots_in_field(*Fp, m);
    bool squarefree = poly_gcd(m, m.derivative()).degree() == 0;
    bool splits = static_cast<int>(u.eigenvalues.size()) == m.degree() || !squarefree;
    if (!squarefree) {
        Poly rest = m;
        for (Elt lam : u.eigenvalues) {
            Poly lin(Fp, {Fp->neg(lam), 1});
            for (;;) {
                Poly q, rem;
                rest.divmod(lin, q, rem);
                if (!rem.is_zero()) break;
                rest = q;
            }
        }
        splits = rest.degree() == 0;
    }
    u.diagonalizable = squarefree && splits;
    // Over a finite field every nonzero element of F is a root of unity.
    u.all_in_k_u = splits;
    return u;
}

UProperty u_property_check(const Derivation& D) { return u_property_check(D.c->field(), degree_one_operator(D)); }

uint64_t idempotent_exponent(const FieldPtr& F, const DenseMatrix& M)
{
    uint64_t N = exponent_from(idem_data(F, M));
    if (M.rows) {
        DenseMatrix P = mat_pow(*F, M, N);
        if (!(mat_mul(*F, P, P) == P)) throw std::logic_error("iterate is not idempotent");
    }
    return N;
}

uint64_t idempotent_exponent(const Derivation& D)
{
    const Complex& c = *D.c;
    IdemData all;
    for (auto& k : c.keys()) {
        IdemData b = idem_data(c.field(), block_operator(D, k));
        all.a = std::max(all.a, b.a);
        all.L = std::lcm(all.L, b.L);
    }
    uint64_t N = exponent_from(all);
    for (auto& k : c.keys()) {
        DenseMatrix P = mat_pow(*c.field(), block_operator(D, k), N);
        if (!(mat_mul(*c.field(), P, P) == P)) throw std::logic_error("iterate is not idempotent");
    }
    return N;
}

Complex kernel_model(const Complex& c, const std::vector<Derivation>& Ds)
{
    const Field& F = *c.field();
    std::set<Mono> keep;
    for (Mono m : c.all_monomials()) keep.insert(m);
    for (const Derivation& D : Ds) {
        if (D.shift != 0) throw std::invalid_argument("kernel model needs a degree-preserving operator");
        std::set<Mono> ker;
        for (auto& k : c.keys()) {
            DenseMatrix M = block_operator(D, k);
            if (!is_diagonal(M) && !u_property_check(c.field(), M).diagonalizable)
                throw std::domain_error("operator is not diagonalizable; use idempotent_exponent and the image of 1 - D^N");
            DenseMatrix K = left_kernel(F, M);
            rref(F, K);
            const auto& basis = c.basis(k);
            for (size_t r = 0; r < K.rows; ++r) {
                size_t nz = 0, at = 0;
                for (size_t j = 0; j < K.cols; ++j)
                    if (K.at(r, j)) {
                        ++nz;
                        at = j;
                    }
                if (nz != 1) throw std::domain_error("kernel is not spanned by basis monomials");
                ker.insert(basis[at]);
            }
        }
        std::set<Mono> both;
        std::set_intersection(keep.begin(), keep.end(), ker.begin(), ker.end(), std::inserter(both, both.begin()));
        keep = std::move(both);
    }
    return subcomplex_custom(c, "kernel", [&keep](Mono m) { return keep.count(m) != 0; });
}

std::map<BlockKey, uint64_t> iterated_model_dims(const Derivation& D)
{
    const Complex& c = *D.c;
    const Field& F = *c.field();
    std::map<BlockKey, uint64_t> out;
    for (auto& k : c.keys()) {
        DenseMatrix M = block_operator(D, k);
        uint64_t N = idempotent_exponent(c.field(), M);
        DenseMatrix R = mat_sub(F, DenseMatrix::identity(M.rows), mat_pow(F, M, N));
        out[k] = rank_dense(F, R);
    }
    return out;
}

DenseMatrix circledast(const Field& F, const DenseMatrix& A, const DenseMatrix& B)
{
    if (A.rows != A.cols || B.rows != B.cols) throw std::invalid_argument("circledast needs square matrices");
    size_t a = A.rows, b = B.rows;
    DenseMatrix C(a * b, a * b);
    for (size_t i = 0; i < a; ++i)
        for (size_t k = 0; k < b; ++k)
            for (size_t j = 0; j < a; ++j)
                for (size_t l = 0; l < b; ++l) {
                    Elt v = 0;
                    if (k == l) v = A.at(i, j);
                    if (i == j) v = F.add(v, B.at(k, l));
                    C.at(i * b + k, j * b + l) = v;
                }
    return C;
}

Derivation h_omega(const Complex& gl, Elt omega)
{
    const Field& F = *gl.field();
    const int n = gl.n();
    if (omega == 1) throw std::invalid_argument("omega must differ from 1");
    Elt c = F.div(omega, F.sub(1, omega));
    std::vector<Elt> values(n * n, 0);
    for (int j = 1; j <= n; ++j) values[slot_of(n, j, n)] = F.mul(F.pow(omega, j), c);
    return extend_functional(gl, values);
}

Elt lambda_omega(const Field& F, Elt omega, int i, int j)
{
    Elt s = 0;
    for (int l = 1; l <= i; ++l) s = F.add(s, F.pow(omega, static_cast<uint64_t>(j + l)));
    return s;
}

std::vector<int64_t> cyclotomic(unsigned d)
{
    if (d == 0) throw std::invalid_argument("cyclotomic index must be positive");
    std::vector<int64_t> f(d + 1, 0);
    f[0] = -1;
    f[d] = 1;
    for (unsigned e = 1; e < d; ++e) {
        if (d % e) continue;
        std::vector<int64_t> g = cyclotomic(e);
        // Exact division by the monic g.
        std::vector<int64_t> q(f.size() - g.size() + 1, 0);
        for (size_t k = q.size(); k-- > 0;) {
            int64_t c = f[k + g.size() - 1];
            q[k] = c;
            for (size_t t = 0; t < g.size(); ++t) f[k + t] -= c * g[t];
        }
        f = q;
    }
    return f;
}

unsigned splitting_degree(uint64_t p, unsigned n)
{
    if (n == 0 || p % n == 0) throw std::invalid_argument("n must be prime to p");
    unsigned m = 1;
    uint64_t r = p % n;
    while (n > 1 && r != 1) {
        r = r * (p % n) % n;
        ++m;
    }
    return m;
}

std::vector<Elt> model_roots(const Field& F, unsigned n)
{
    std::vector<Elt> out;
    for (unsigned d = 2; d <= n; ++d) {
        if (n % d) continue;
        Elt w = primitive_root_of_unity(F, d);
        std::vector<int64_t> phi = cyclotomic(d);
        Elt v = 0;
        for (size_t k = phi.size(); k-- > 0;) v = F.add(F.mul(v, w), F.from_int(phi[k]));
        if (v != 0) throw std::logic_error("root does not satisfy its cyclotomic factor");
        out.push_back(w);
    }
    return out;
}

} // namespace stabfold
