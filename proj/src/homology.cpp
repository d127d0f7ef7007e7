#include "stabfold/homology.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "stabfold/parallel.hpp"

namespace stabfold {

uint64_t BettiTable::at(const BlockKey& k) const
{
    auto it = entries.find(k);
    return it == entries.end() ? 0 : it->second;
}

std::vector<uint64_t> BettiTable::totals() const
{
    std::vector<uint64_t> t(top_degree + 1, 0);
    for (auto& [k, v] : entries) t[k.s] += v;
    return t;
}

uint64_t BettiTable::total() const
{
    uint64_t t = 0;
    for (auto& [k, v] : entries) t += v;
    return t;
}

nlohmann::json BettiTable::to_json() const
{
    nlohmann::json rows = nlohmann::json::array();
    for (auto& [k, v] : entries)
        if (v) rows.push_back({{"s", k.s}, {"u", k.u}, {"dim", v}});
    return {{"blocks", rows}, {"totals", totals()}, {"total", total()}};
}

std::string BettiTable::to_csv() const
{
    std::ostringstream os;
    os << "s,u,dim\n";
    for (auto& [k, v] : entries)
        if (v) os << k.s << ',' << k.u << ',' << v << '\n';
    return os.str();
}

std::map<BlockKey, uint64_t> block_ranks(const MatrixComplex& mc, RankMethod method)
{
    std::vector<BlockKey> keys;
    for (auto& [k, m] : mc.d) keys.push_back(k);
    std::vector<uint64_t> r(keys.size());
    // Largest blocks first so one straggler does not serialize the tail.
    std::vector<size_t> order(keys.size());
    for (size_t t = 0; t < order.size(); ++t) order[t] = t;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return mc.d.at(keys[a]).nnz() > mc.d.at(keys[b]).nnz();
    });
    parallel_for(order.size(), [&](size_t t) {
        size_t k = order[t];
        r[k] = rank(*mc.F, mc.d.at(keys[k]), method);
    });
    std::map<BlockKey, uint64_t> out;
    for (size_t t = 0; t < keys.size(); ++t) out[keys[t]] = r[t];
    return out;
}

BettiTable betti(const MatrixComplex& mc, int top_degree, RankMethod method)
{
    auto ranks = block_ranks(mc, method);
    auto rk = [&](const BlockKey& k) -> uint64_t {
        auto it = ranks.find(k);
        return it == ranks.end() ? 0 : it->second;
    };
    BettiTable t;
    t.top_degree = top_degree;
    for (auto& [k, dim] : mc.dims) t.entries[k] = dim - rk(k) - rk({k.s - 1, k.u});
    return t;
}

BettiTable betti(const Complex& c, RankMethod method)
{
    if (c.bundle()) throw std::invalid_argument("betti needs a fiber complex; route bundle questions through pages");
    return betti(c.matrices(), c.n() * c.n(), method);
}

std::vector<uint64_t> exterior_profile(const std::vector<int>& degrees, int top_degree)
{
    std::vector<uint64_t> p(top_degree + 1, 0);
    p[0] = 1;
    for (int d : degrees)
        for (int s = top_degree; s >= d; --s) p[s] += p[s - d];
    return p;
}

CohomologyBasis::CohomologyBasis(const Complex& c) : c_(&c)
{
    const Field& F = *c.field();
    const MatrixComplex& mc = c.matrices();
    std::vector<BlockKey> keys = c.keys();
    std::vector<Block> out(keys.size());
    parallel_for(keys.size(), [&](size_t t) {
        const BlockKey& k = keys[t];
        size_t n = mc.dim(k);
        Block& b = out[t];
        DenseMatrix Z;
        if (const SparseMatrix* d = mc.diff(k); d && d->cols)
            Z = left_kernel(F, DenseMatrix::from_sparse(*d));
        else
            Z = DenseMatrix::identity(n);
        DenseMatrix B(0, n);
        if (const SparseMatrix* dp = mc.diff({k.s - 1, k.u}); dp && dp->rows)
            B = row_basis(F, DenseMatrix::from_sparse(*dp));
        std::vector<size_t> bp;
        for (size_t r = 0; r < B.rows; ++r) {
            size_t j = 0;
            while (B.at(r, j) == 0) ++j;
            bp.push_back(j);
        }
        // Clear coboundary pivots from the cocycles, then echelonize what is left.
        for (size_t z = 0; z < Z.rows; ++z)
            for (size_t r = 0; r < B.rows; ++r) {
                Elt f = Z.at(z, bp[r]);
                if (!f) continue;
                for (size_t j = 0; j < n; ++j) Z.at(z, j) = F.sub(Z.at(z, j), F.mul(f, B.at(r, j)));
            }
        std::vector<size_t> zp = rref(F, Z);
        b.boundary_rows = B.rows;
        b.echelon = DenseMatrix(B.rows + zp.size(), n);
        std::copy(B.a.begin(), B.a.end(), b.echelon.a.begin());
        std::copy(Z.a.begin(), Z.a.begin() + zp.size() * n, b.echelon.a.begin() + B.a.size());
        b.pivots = bp;
        b.pivots.insert(b.pivots.end(), zp.begin(), zp.end());
        const auto& basis = c.basis(k);
        for (size_t r = 0; r < zp.size(); ++r) {
            Cochain rep(c.field());
            for (size_t j = 0; j < n; ++j)
                if (Elt v = Z.at(r, j)) rep.add_term(basis[j], v);
            b.reps.push_back(rep);
        }
    });
    for (size_t t = 0; t < keys.size(); ++t) blocks_.emplace(keys[t], std::move(out[t]));
}

size_t CohomologyBasis::dim(const BlockKey& k) const
{
    auto it = blocks_.find(k);
    return it == blocks_.end() ? 0 : it->second.reps.size();
}

std::vector<BlockKey> CohomologyBasis::keys() const
{
    std::vector<BlockKey> out;
    for (auto& [k, b] : blocks_)
        if (!b.reps.empty()) out.push_back(k);
    return out;
}

const std::vector<Cochain>& CohomologyBasis::representatives(const BlockKey& k) const
{
    static const std::vector<Cochain> empty;
    auto it = blocks_.find(k);
    return it == blocks_.end() ? empty : it->second.reps;
}

ClassVector CohomologyBasis::basis_class(const BlockKey& k, size_t idx) const
{
    size_t d = dim(k);
    if (idx >= d) throw std::out_of_range("class index out of range");
    std::vector<Elt> v(d, 0);
    v[idx] = 1;
    return {{k, v}};
}

Cochain CohomologyBasis::lift(const ClassVector& v) const
{
    Cochain z(c_->field());
    for (auto& [k, coords] : v) {
        const auto& reps = representatives(k);
        for (size_t i = 0; i < coords.size(); ++i)
            if (coords[i]) z += reps.at(i).scaled(coords[i]);
    }
    return z;
}

std::vector<Elt> CohomologyBasis::reduce(const BlockKey& k, std::vector<Elt> v, std::vector<Elt>* rem) const
{
    const Field& F = *c_->field();
    auto it = blocks_.find(k);
    if (it == blocks_.end()) {
        if (rem) *rem = v;
        return {};
    }
    const Block& b = it->second;
    std::vector<Elt> out(b.reps.size(), 0);
    for (size_t r = 0; r < b.echelon.rows; ++r) {
        Elt f = v[b.pivots[r]];
        if (!f) continue;
        if (r >= b.boundary_rows) out[r - b.boundary_rows] = f;
        for (size_t j = 0; j < v.size(); ++j) v[j] = F.sub(v[j], F.mul(f, b.echelon.at(r, j)));
    }
    if (rem) *rem = v;
    return out;
}

ClassVector CohomologyBasis::classify(const Cochain& z) const
{
    if (!c_->d(z).is_zero()) throw std::invalid_argument("not a cocycle: " + z.to_string(c_->n()));
    std::map<BlockKey, std::vector<Elt>> coords;
    for (auto& [m, v] : z.terms()) {
        auto [k, pos] = c_->locate(m);
        auto& cv = coords[k];
        if (cv.empty()) cv.assign(c_->basis(k).size(), 0);
        cv[pos] = v;
    }
    ClassVector out;
    for (auto& [k, cv] : coords) {
        std::vector<Elt> rem;
        std::vector<Elt> r = reduce(k, cv, &rem);
        if (std::any_of(rem.begin(), rem.end(), [](Elt e) { return e != 0; }))
            throw std::logic_error("cocycle not reduced by the cohomology basis");
        if (std::any_of(r.begin(), r.end(), [](Elt e) { return e != 0; })) out[k] = r;
    }
    return out;
}

ClassVector class_add(const Field& F, const ClassVector& a, const ClassVector& b)
{
    ClassVector out = a;
    for (auto& [k, v] : b) {
        auto& o = out[k];
        if (o.empty()) o.assign(v.size(), 0);
        for (size_t i = 0; i < v.size(); ++i) o[i] = F.add(o[i], v[i]);
        if (std::all_of(o.begin(), o.end(), [](Elt e) { return e == 0; })) out.erase(k);
    }
    return out;
}

ClassVector class_scale(const Field& F, const ClassVector& a, Elt s)
{
    if (!s) return {};
    ClassVector out = a;
    for (auto& [k, v] : out)
        for (auto& e : v) e = F.mul(e, s);
    return out;
}

bool class_is_zero(const ClassVector& a)
{
    for (auto& [k, v] : a)
        for (Elt e : v)
            if (e) return false;
    return true;
}

ClassVector cup(const CohomologyBasis& H, const ClassVector& a, const ClassVector& b)
{
    return H.classify(H.lift(a).wedge(H.lift(b)));
}

namespace {

// Global coordinates over all classes of H.
struct Flattener {
    std::map<BlockKey, size_t> offset;
    size_t total = 0;
    explicit Flattener(const CohomologyBasis& H)
    {
        for (auto& k : H.keys()) {
            offset[k] = total;
            total += H.dim(k);
        }
    }
    std::vector<Elt> flat(const ClassVector& v) const
    {
        std::vector<Elt> out(total, 0);
        for (auto& [k, cv] : v) {
            size_t o = offset.at(k);
            for (size_t i = 0; i < cv.size(); ++i) out[o + i] = cv[i];
        }
        return out;
    }
};

size_t rank_of(const Field& F, const std::vector<std::vector<Elt>>& rows, size_t cols)
{
    if (rows.empty() || cols == 0) return 0;
    DenseMatrix M(rows.size(), cols);
    for (size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), M.a.begin() + r * cols);
    return rank_dense(F, M);
}

} // namespace

RingCheck exterior_ring_check(const CohomologyBasis& H, const std::vector<int>& expected_degrees)
{
    const Field& F = *H.complex().field();
    RingCheck res;
    int top = H.complex().n() * H.complex().n();
    std::vector<uint64_t> want = exterior_profile(expected_degrees, top);
    std::vector<uint64_t> have(top + 1, 0);
    for (auto& k : H.keys()) have[k.s] += H.dim(k);
    if (have != want) {
        std::ostringstream os;
        os << "betti profile mismatch: have";
        for (auto v : have) os << ' ' << v;
        os << ", exterior";
        for (auto v : want) os << ' ' << v;
        res.diagnostic = os.str();
        return res;
    }
    Flattener fl(H);
    std::vector<int> degs = expected_degrees;
    std::sort(degs.begin(), degs.end());
    // products[mask] is the cup product of the chosen generators in mask.
    std::vector<ClassVector> products{ClassVector{{BlockKey{0, 0}, {1}}}};
    if (H.dim({0, 0}) != 1) {
        res.diagnostic = "no unit class";
        return res;
    }
    for (int d : degs) {
        std::vector<ClassVector> candidates;
        for (auto& k : H.keys())
            if (k.s == d)
                for (size_t i = 0; i < H.dim(k); ++i) candidates.push_back(H.basis_class(k, i));
        bool found = false;
        for (const ClassVector& g : candidates) {
            if (!class_is_zero(cup(H, g, g))) continue;
            std::vector<ClassVector> next = products;
            for (const ClassVector& pr : products) next.push_back(cup(H, pr, g));
            std::vector<std::vector<Elt>> rows;
            for (auto& v : next) rows.push_back(fl.flat(v));
            if (rank_of(F, rows, fl.total) == next.size()) {
                products = std::move(next);
                res.generators.push_back(g);
                found = true;
                break;
            }
        }
        if (!found) {
            res.diagnostic = "no independent square-zero generator in degree " + std::to_string(d);
            return res;
        }
    }
    res.ok = products.size() == fl.total;
    if (!res.ok) res.diagnostic = "products do not exhaust the cohomology";
    return res;
}

InducedRank induced_map_rank(const ChainMap& f, const CohomologyBasis& Hs, const CohomologyBasis& Ht)
{
    const Complex& A = *f.source;
    const Complex& B = *f.target;
    const Field& F = *B.field();
    auto apply = [&](const Cochain& z) {
        Cochain r(B.field());
        for (auto& [m, v] : z.terms()) r += f.apply(m).scaled(v);
        return r;
    };
    for (auto& k : A.keys())
        for (Mono m : A.basis(k))
            if (!(apply(A.d(m)) == B.d(f.apply(m))))
                throw std::invalid_argument("not a chain map at " + format_mono(m, A.n()));
    Flattener fl(Ht);
    InducedRank out;
    int top = A.n() * A.n();
    out.per_degree.assign(top + 1, 0);
    std::vector<std::vector<std::vector<Elt>>> by_degree(top + 1);
    for (auto& k : Hs.keys()) {
        std::vector<std::vector<Elt>> rows;
        for (const Cochain& rep : Hs.representatives(k)) rows.push_back(fl.flat(Ht.classify(apply(rep))));
        out.per_block[k] = rank_of(F, rows, fl.total);
        by_degree[k.s].insert(by_degree[k.s].end(), rows.begin(), rows.end());
    }
    for (int s = 0; s <= top; ++s) out.per_degree[s] = rank_of(F, by_degree[s], fl.total);
    return out;
}

bool is_quasi_isomorphism(const InducedRank& r, const BettiTable& a, const BettiTable& b)
{
    auto ta = a.totals(), tb = b.totals();
    return ta == tb && r.per_degree == ta;
}

bool is_surjective(const InducedRank& r, const BettiTable& target) { return r.per_degree == target.totals(); }

} // namespace stabfold
