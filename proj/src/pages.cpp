#include "stabfold/pages.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "stabfold/parallel.hpp"

namespace stabfold {

int64_t FilteredComplex::t_min() const
{
    int64_t m = INT64_MAX;
    for (auto& c : cells) m = std::min(m, c.t);
    return cells.empty() ? 0 : m;
}

int64_t FilteredComplex::t_max() const
{
    int64_t m = INT64_MIN;
    for (auto& c : cells) m = std::max(m, c.t);
    return cells.empty() ? 0 : m;
}

namespace {

void check_filtered(const FilteredComplex& fc)
{
    for (size_t k = 0; k < fc.cells.size(); ++k)
        for (auto& [col, v] : fc.d[k]) {
            const auto& a = fc.cells[k];
            const auto& b = fc.cells[col];
            if (b.s != a.s + 1 || b.u != a.u) throw std::logic_error("differential leaves its (s, u) column");
            if (b.t < a.t) throw std::logic_error("differential lowers the filtration at " + format_mono(a.mono, fc.n));
            (void)v;
        }
}

} // namespace

FilteredComplex filter_by(const Complex& c, const std::function<int64_t(Mono)>& t, const std::string& name)
{
    if (c.bundle()) throw std::invalid_argument("filter_by needs a fiber complex");
    FilteredComplex fc;
    fc.F = c.field();
    fc.n = c.n();
    fc.name = name;
    std::unordered_map<Mono, uint32_t> at;
    for (auto& k : c.keys())
        for (Mono m : c.basis(k)) {
            at[m] = static_cast<uint32_t>(fc.cells.size());
            fc.cells.push_back({k.s, t(m), k.u, m, 0});
        }
    fc.d.resize(fc.cells.size());
    parallel_for(fc.cells.size(), [&](size_t k) {
        Cochain z = c.d(fc.cells[k].mono);
        SparseRow row;
        for (auto& [m, v] : z.terms()) row.emplace_back(at.at(m), v);
        std::sort(row.begin(), row.end());
        fc.d[k] = std::move(row);
    });
    check_filtered(fc);
    return fc;
}

FilteredComplex filter_first_subscript(const Complex& gl)
{
    if (gl.desc().lie != Lie::gl) throw std::invalid_argument("first-subscript filtration needs CE(gl_n)");
    const int n = gl.n();
    FilteredComplex fc = filter_by(gl, [n](Mono m) { return first_subscript_weight(m, n); }, "first-subscript");
    // gr d must be the eps = 0 Ravenel differential, term for term.
    Dga rav = Dga::deformed(n);
    const FieldPtr& F = fc.F;
    for (size_t k = 0; k < fc.cells.size(); ++k) {
        const auto& a = fc.cells[k];
        Cochain gr(F), want(F);
        for (auto& [col, v] : fc.d[k])
            if (fc.cells[col].t == a.t) gr.add_term(fc.cells[col].mono, v);
            else if (fc.cells[col].t != a.t + n) throw std::logic_error("first-subscript jump other than 0 or n");
        rav.d_mono(a.mono, [&](int sign, int epow, Mono m) {
            if (epow == 0) want.add_term(m, F->from_int(sign));
        });
        if (!(gr == want)) throw std::logic_error("associated graded differs from CE(L(n,n)) at " + format_mono(a.mono, n));
    }
    return fc;
}

FilteredComplex critical_block(const FilteredComplex& fc)
{
    FilteredComplex out;
    out.F = fc.F;
    out.n = fc.n;
    out.trusted_max = fc.trusted_max;
    out.name = fc.name + "/critical";
    std::vector<int64_t> remap(fc.cells.size(), -1);
    for (size_t k = 0; k < fc.cells.size(); ++k)
        if (fc.cells[k].u == 0) {
            remap[k] = static_cast<int64_t>(out.cells.size());
            out.cells.push_back(fc.cells[k]);
        }
    out.d.resize(out.cells.size());
    for (size_t k = 0; k < fc.cells.size(); ++k) {
        if (remap[k] < 0) continue;
        SparseRow row;
        for (auto& [col, v] : fc.d[k]) row.emplace_back(static_cast<uint32_t>(remap[col]), v);
        out.d[remap[k]] = std::move(row);
    }
    return out;
}

FilteredComplex filter_lattice(const Lattice& L, int64_t t_max)
{
    if (L.closure)
        throw std::domain_error("lattice is not closed under d: " + format_mono(L.closure->source, L.conn.n) + " -> " +
                                format_mono(L.closure->target, L.conn.n));
    const Complex& c = *L.fixed;
    FilteredComplex fc;
    fc.F = c.field();
    fc.n = c.n();
    fc.trusted_max = t_max;
    fc.name = L.kind == Lattice::Kind::core ? "core" : "medial";
    std::map<std::pair<Mono, int64_t>, uint32_t> at;
    for (auto& k : c.keys())
        for (Mono b : c.basis(k))
            for (int64_t e = L.lower_exponent(b); L.filtration(b, e) <= t_max; ++e) {
                at[{b, e}] = static_cast<uint32_t>(fc.cells.size());
                fc.cells.push_back({k.s, L.filtration(b, e), k.u, b, e});
            }
    fc.d.resize(fc.cells.size());
    std::map<Mono, PolyCochain> db;
    for (Mono b : c.all_monomials()) db.emplace(b, c.d_bundle(b));
    for (size_t k = 0; k < fc.cells.size(); ++k) {
        const auto& a = fc.cells[k];
        SparseRow row;
        for (auto& [t, poly] : db.at(a.mono).terms())
            for (size_t f = 0; f < poly.coeffs().size(); ++f) {
                if (!poly.coeff(f)) continue;
                auto it = at.find({t, a.xpow + static_cast<int64_t>(f)});
                if (it == at.end()) continue; // beyond the truncation
                row.emplace_back(it->second, poly.coeff(f));
            }
        std::sort(row.begin(), row.end());
        fc.d[k] = std::move(row);
    }
    check_filtered(fc);
    return fc;
}

namespace {

// One (u) summand with dense local coordinates per degree s.
struct Column {
    const FilteredComplex* fc = nullptr;
    const Field* F = nullptr;
    std::map<int, std::vector<uint32_t>> cells; // s -> global cell ids
    std::map<int, DenseMatrix> D;               // s -> d: C^s -> C^(s+1)
    std::map<std::tuple<int, int64_t, int>, DenseMatrix> zcache;

    size_t dim(int s) const
    {
        auto it = cells.find(s);
        return it == cells.end() ? 0 : it->second.size();
    }
    int64_t t_of(int s, size_t local) const { return fc->cells[cells.at(s)[local]].t; }

    // Z_r^{s,t} = {x in F^t : dx in F^(t+r)}, rows in C^s coordinates.
    const DenseMatrix& Z(int s, int64_t t, int r)
    {
        auto key = std::make_tuple(s, t, r);
        if (auto it = zcache.find(key); it != zcache.end()) return it->second;
        size_t ds = dim(s), dt = dim(s + 1);
        std::vector<size_t> src, bad;
        for (size_t i = 0; i < ds; ++i)
            if (t_of(s, i) >= t) src.push_back(i);
        for (size_t j = 0; j < dt; ++j)
            if (t_of(s + 1, j) < t + r) bad.push_back(j);
        DenseMatrix out(0, ds);
        if (!src.empty()) {
            DenseMatrix K;
            if (bad.empty()) {
                K = DenseMatrix::identity(src.size());
            } else {
                const DenseMatrix& M = D.at(s);
                DenseMatrix S(src.size(), bad.size());
                for (size_t a = 0; a < src.size(); ++a)
                    for (size_t b = 0; b < bad.size(); ++b) S.at(a, b) = M.at(src[a], bad[b]);
                K = left_kernel(*F, S);
            }
            out = DenseMatrix(K.rows, ds);
            for (size_t r2 = 0; r2 < K.rows; ++r2)
                for (size_t a = 0; a < src.size(); ++a) out.at(r2, src[a]) = K.at(r2, a);
        }
        return zcache.emplace(key, std::move(out)).first->second;
    }

    // B_r^{s,t} = d Z_r^{s-1,t-r}.
    DenseMatrix B(int s, int64_t t, int r)
    {
        if (dim(s - 1) == 0) return DenseMatrix(0, dim(s));
        return mat_mul(*F, Z(s - 1, t - r, r), D.at(s - 1));
    }

    size_t span(const DenseMatrix& A, const DenseMatrix& Bm) const
    {
        if (A.rows + Bm.rows == 0) return 0;
        return rank_dense(*F, vstack(A, Bm));
    }
};

} // namespace

uint64_t PageReport::dim(int r, int s, int64_t t, uint64_t u) const
{
    for (auto& e : entries)
        if (e.r == r && e.s == s && e.t == t && e.u == u) return e.dim;
    return 0;
}

uint64_t PageReport::total(int r) const
{
    uint64_t x = 0;
    for (auto& e : entries)
        if (e.r == r) x += e.dim;
    return x;
}

std::map<std::pair<int, uint64_t>, uint64_t> PageReport::column_totals(int r) const
{
    std::map<std::pair<int, uint64_t>, uint64_t> out;
    for (auto& e : entries)
        if (e.r == r) out[{e.s, e.u}] += e.dim;
    return out;
}

nlohmann::json PageReport::to_json() const
{
    nlohmann::json pages = nlohmann::json::array();
    for (auto& e : entries)
        pages.push_back({{"r", e.r}, {"s", e.s}, {"t", e.t}, {"u", e.u}, {"dim", e.dim}, {"rank_out", e.rank_out}});
    return {{"name", name},
            {"r_max", r_max},
            {"converged", converged},
            {"collapse_page", collapse_page},
            {"pages", pages},
            {"nonzero_differentials", nonzero_differentials}};
}

PageReport run_pages(const FilteredComplex& fc, int r_max)
{
    const Field& F = *fc.F;
    PageReport rep;
    rep.name = fc.name;
    const bool truncated = fc.trusted_max != INT64_MAX;
    const int64_t lo = fc.t_min(), hi = fc.t_max();
    const int span = static_cast<int>(hi - lo);
    if (r_max < 0) r_max = span + 1;
    rep.r_max = r_max;
    rep.converged = r_max > span;

    std::map<uint64_t, Column> cols;
    std::unordered_map<uint32_t, uint32_t> local;
    for (uint32_t k = 0; k < fc.cells.size(); ++k) {
        auto& col = cols[fc.cells[k].u];
        auto& v = col.cells[fc.cells[k].s];
        local[k] = static_cast<uint32_t>(v.size());
        v.push_back(k);
    }
    std::vector<uint64_t> us;
    for (auto& [u, col] : cols) {
        col.fc = &fc;
        col.F = &F;
        for (auto& [s, ids] : col.cells) {
            DenseMatrix M(ids.size(), col.dim(s + 1));
            for (size_t a = 0; a < ids.size(); ++a)
                for (auto& [c2, v] : fc.d[ids[a]]) M.at(a, local.at(c2)) = v;
            col.D[s] = std::move(M);
        }
        us.push_back(u);
    }

    std::vector<std::vector<PageEntry>> found(us.size());
    parallel_for(us.size(), [&](size_t q) {
        Column& col = cols.at(us[q]);
        auto& out = found[q];
        for (int r = 0; r <= r_max; ++r)
            for (auto& [s, ids] : col.cells)
                for (int64_t t = lo; t <= hi; ++t) {
                    if (truncated && t + 2 * r > fc.trusted_max + 1) continue;
                    const DenseMatrix& Zr = col.Z(s, t, r);
                    size_t below = col.span(col.Z(s, t + 1, r - 1), col.B(s, t, r - 1));
                    uint64_t dim = col.span(Zr, DenseMatrix(0, col.dim(s))) - below;
                    if (!dim) continue;
                    uint64_t rk = 0;
                    if (col.dim(s + 1)) {
                        DenseMatrix base = vstack(col.Z(s + 1, t + r + 1, r - 1), col.B(s + 1, t + r, r - 1));
                        DenseMatrix img = mat_mul(F, Zr, col.D.at(s));
                        rk = col.span(img, base) - col.span(base, DenseMatrix(0, col.dim(s + 1)));
                    }
                    out.push_back({r, s, t, us[q], dim, rk});
                }
    });
    for (auto& v : found) rep.entries.insert(rep.entries.end(), v.begin(), v.end());
    std::sort(rep.entries.begin(), rep.entries.end(), [](const PageEntry& a, const PageEntry& b) {
        return std::tie(a.r, a.s, a.t, a.u) < std::tie(b.r, b.s, b.t, b.u);
    });

    int last_nonzero = 0;
    for (auto& e : rep.entries)
        if (e.r >= 1 && e.rank_out) {
            last_nonzero = std::max(last_nonzero, e.r);
            rep.nonzero_differentials.push_back("d_" + std::to_string(e.r) + ": (" + std::to_string(e.s) + "," +
                                                std::to_string(e.t) + "," + std::to_string(e.u) + ") rank " +
                                                std::to_string(e.rank_out));
        }
    rep.collapse_page = last_nonzero + 1 <= r_max ? last_nonzero + 1 : 0;

    if (rep.converged && !truncated) {
        // E_infinity must recover the cohomology of the underlying complex.
        std::map<std::pair<int, uint64_t>, uint64_t> want;
        for (auto& [u, col] : cols)
            for (auto& [s, ids] : col.cells) {
                size_t rk_out = col.D.at(s).cols ? rank_dense(F, col.D.at(s)) : 0;
                size_t rk_in = col.dim(s - 1) ? rank_dense(F, col.D.at(s - 1)) : 0;
                uint64_t b = ids.size() - rk_out - rk_in;
                if (b) want[{s, u}] = b;
            }
        if (rep.column_totals(r_max) != want) throw std::logic_error("E_infinity does not match the cohomology");
    }
    return rep;
}

MonodromyReport monodromy_ss(const Lattice& L, int64_t t_max)
{
    MonodromyReport rep;
    FilteredComplex fc = filter_lattice(L, t_max);
    rep.pages = run_pages(fc);
    rep.homogeneous = core_homogeneity(L).holds;
    rep.collapses = true;
    for (auto& e : rep.pages.entries)
        if (e.r >= 1 && e.rank_out) rep.collapses = false;

    const Complex& bundle = *L.fixed;
    Descriptor d = bundle.desc();
    d.eps = EpsMode::smooth();
    Complex fiber = closed_complex(d, [&L](Mono m) { return L.conn.fixed(m); });
    BettiTable bt = betti(fiber);
    rep.fiber_betti.assign(fiber.n() * fiber.n() + 1, 0);
    for (auto& [k, v] : bt.entries) rep.fiber_betti[k.s] += v;

    rep.e1_matches_fiber = true;
    for (int64_t t = 0; t + 2 <= t_max + 1; ++t) {
        std::vector<uint64_t> got(rep.fiber_betti.size(), 0);
        for (auto& e : rep.pages.entries)
            if (e.r == 1 && e.t == t) got[e.s] += e.dim;
        if (got != rep.fiber_betti) rep.e1_matches_fiber = false;
    }
    return rep;
}

std::map<std::pair<int, int64_t>, uint64_t> e1_inclusion_rank(const FilteredComplex& sub, const FilteredComplex& super)
{
    const Field& F = *super.F;
    std::map<std::pair<Mono, int64_t>, uint32_t> sup_at;
    for (uint32_t k = 0; k < super.cells.size(); ++k) sup_at[{super.cells[k].mono, super.cells[k].xpow}] = k;
    std::vector<uint32_t> image(sub.cells.size());
    for (uint32_t k = 0; k < sub.cells.size(); ++k) {
        auto it = sup_at.find({sub.cells[k].mono, sub.cells[k].xpow});
        if (it == sup_at.end() || super.cells[it->second].t != sub.cells[k].t)
            throw std::invalid_argument("sub cell is not a filtered cell of super");
        image[k] = it->second;
    }

    // gr^t pieces, keyed by (s, t, u).
    using Key = std::tuple<int, int64_t, uint64_t>;
    auto group = [](const FilteredComplex& fc) {
        std::map<Key, std::vector<uint32_t>> g;
        for (uint32_t k = 0; k < fc.cells.size(); ++k) g[{fc.cells[k].s, fc.cells[k].t, fc.cells[k].u}].push_back(k);
        return g;
    };
    auto gsub = group(sub), gsup = group(super);
    // d_0 from piece (s,t,u) to (s+1,t,u), rows in the piece order.
    auto d0 = [](const FilteredComplex& fc, const std::vector<uint32_t>& from, const std::vector<uint32_t>* to) {
        std::unordered_map<uint32_t, size_t> pos;
        if (to)
            for (size_t j = 0; j < to->size(); ++j) pos[(*to)[j]] = j;
        DenseMatrix M(from.size(), to ? to->size() : 0);
        for (size_t a = 0; a < from.size(); ++a)
            for (auto& [c, v] : fc.d[from[a]])
                if (auto it = pos.find(c); it != pos.end()) M.at(a, it->second) = v;
        return M;
    };

    std::map<std::pair<int, int64_t>, uint64_t> out;
    for (auto& [key, ids] : gsup) out[{std::get<0>(key), std::get<1>(key)}] += 0;
    for (auto& [key, ids] : gsub) {
        auto [s, t, u] = key;
        auto nxt = gsub.find({s + 1, t, u});
        DenseMatrix M = d0(sub, ids, nxt == gsub.end() ? nullptr : &nxt->second);
        DenseMatrix Z = M.cols ? left_kernel(F, M) : DenseMatrix::identity(ids.size());
        const auto& sup_ids = gsup.at(key);
        std::unordered_map<uint32_t, size_t> pos;
        for (size_t j = 0; j < sup_ids.size(); ++j) pos[sup_ids[j]] = j;
        DenseMatrix Zs(Z.rows, sup_ids.size());
        for (size_t r = 0; r < Z.rows; ++r)
            for (size_t a = 0; a < ids.size(); ++a) Zs.at(r, pos.at(image[ids[a]])) = Z.at(r, a);
        DenseMatrix Bs(0, sup_ids.size());
        if (auto prev = gsup.find({s - 1, t, u}); prev != gsup.end()) Bs = d0(super, prev->second, &sup_ids);
        size_t rb = Bs.rows ? rank_dense(F, Bs) : 0;
        size_t rz = Zs.rows + Bs.rows ? rank_dense(F, vstack(Zs, Bs)) : 0;
        out[{s, t}] += rz - rb;
    }
    return out;
}

} // namespace stabfold
