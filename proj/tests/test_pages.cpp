#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"
#include "stabfold/pages.hpp"

using namespace stabfold;

namespace {

struct Bar {
    size_t src, dst; // dst == src for an unpaired cell
};

// Persistence pairing: cells ordered by (t desc, s desc) make d strictly
// triangular; standard column reduction pairs each surviving column with its
// lowest entry and the bar length is the page on which the pair cancels.
std::vector<Bar> pairing(const FilteredComplex& fc)
{
    const Field& F = *fc.F;
    const size_t N = fc.cells.size();
    std::vector<size_t> order(N), pos(N);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        auto& x = fc.cells[a];
        auto& y = fc.cells[b];
        return std::tie(y.t, y.s) < std::tie(x.t, x.s);
    });
    for (size_t k = 0; k < N; ++k) pos[order[k]] = k;
    std::vector<std::map<size_t, Elt>> col(N);
    for (size_t c = 0; c < N; ++c)
        for (auto [j, v] : fc.d[c]) {
            REQUIRE(pos[j] < pos[c]);
            col[pos[c]][pos[j]] = v;
        }
    std::vector<long> owner(N, -1);
    std::vector<bool> is_low(N, false), is_src(N, false);
    std::vector<Bar> bars;
    for (size_t k = 0; k < N; ++k) {
        auto& c = col[k];
        while (!c.empty()) {
            size_t low = c.rbegin()->first;
            if (owner[low] < 0) break;
            auto& o = col[owner[low]];
            Elt f = F.div(c.rbegin()->second, o.rbegin()->second);
            for (auto [j, v] : o) {
                Elt nv = F.sub(c[j], F.mul(f, v));
                if (nv) c[j] = nv;
                else c.erase(j);
            }
        }
        if (!c.empty()) {
            size_t low = c.rbegin()->first;
            owner[low] = static_cast<long>(k);
            is_low[low] = true;
            is_src[k] = true;
            bars.push_back({order[k], order[low]});
        }
    }
    for (size_t k = 0; k < N; ++k)
        if (!is_low[k] && !is_src[k]) bars.push_back({order[k], order[k]});
    return bars;
}

using Spot = std::tuple<int, int64_t, uint64_t>;

uint64_t oracle_dim(const FilteredComplex& fc, const std::vector<Bar>& bars, int r, const Spot& at)
{
    uint64_t n = 0;
    for (auto& b : bars) {
        auto& x = fc.cells[b.src];
        auto& y = fc.cells[b.dst];
        if (b.src == b.dst) {
            n += Spot{x.s, x.t, x.u} == at;
            continue;
        }
        if (y.t - x.t < r) continue;
        n += Spot{x.s, x.t, x.u} == at;
        n += Spot{y.s, y.t, y.u} == at;
    }
    return n;
}

void compare_with_oracle(const FilteredComplex& fc, const PageReport& rep, bool truncated)
{
    auto bars = pairing(fc);
    std::set<Spot> spots;
    for (auto& c : fc.cells) spots.insert({c.s, c.t, c.u});
    uint64_t mismatches = 0, compared = 0;
    for (int r = 0; r <= rep.r_max; ++r)
        for (auto& sp : spots) {
            auto [s, t, u] = sp;
            if (truncated && t + 2 * r > fc.trusted_max + 1) continue;
            ++compared;
            if (oracle_dim(fc, bars, r, sp) != rep.dim(r, s, t, u)) ++mismatches;
        }
    CAPTURE(fc.name);
    CHECK(compared > 0);
    CHECK(mismatches == 0);
}

void check_page_identities(const FilteredComplex& fc, const PageReport& rep)
{
    std::set<Spot> spots;
    for (auto& c : fc.cells) spots.insert({c.s, c.t, c.u});
    std::map<std::tuple<int, int, int64_t, uint64_t>, uint64_t> rank;
    for (auto& e : rep.entries) rank[{e.r, e.s, e.t, e.u}] = e.rank_out;
    auto rk = [&](int r, int s, int64_t t, uint64_t u) {
        auto it = rank.find({r, s, t, u});
        return it == rank.end() ? uint64_t(0) : it->second;
    };
    int64_t chi0 = 0;
    for (int r = 0; r <= rep.r_max; ++r) {
        int64_t chi = 0;
        for (auto& [s, t, u] : spots) {
            chi += (s % 2 ? -1 : 1) * static_cast<int64_t>(rep.dim(r, s, t, u));
            if (r < rep.r_max) {
                uint64_t next = rep.dim(r, s, t, u) - rk(r, s, t, u) - rk(r, s - 1, t - r, u);
                CHECK(rep.dim(r + 1, s, t, u) == next);
            }
        }
        if (r == 0) chi0 = chi;
        CHECK(chi == chi0);
    }
}

// A direct sum of elementary pairs, scrambled by filtration-preserving basis changes.
FilteredComplex synthetic(uint64_t seed, std::vector<std::pair<size_t, size_t>>& pairs)
{
    std::mt19937_64 rng(seed);
    FilteredComplex fc;
    fc.F = Field::create(7);
    fc.name = "synthetic";
    const size_t N = 40;
    for (size_t k = 0; k < N; ++k)
        fc.cells.push_back({static_cast<int>(rng() % 4), static_cast<int64_t>(rng() % 6), 0, 0, 0});
    std::vector<bool> used(N, false);
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < N; ++b)
            if (!used[a] && !used[b] && a != b && fc.cells[b].s == fc.cells[a].s + 1 && fc.cells[b].t >= fc.cells[a].t &&
                rng() % 3 == 0) {
                used[a] = used[b] = true;
                pairs.push_back({a, b});
            }
    std::vector<std::vector<Elt>> D(N, std::vector<Elt>(N, 0));
    for (auto [a, b] : pairs) D[a][b] = 1;
    const Field& F = *fc.F;
    for (int op = 0; op < 400; ++op) {
        size_t a = rng() % N, b = rng() % N;
        if (a == b || fc.cells[a].s != fc.cells[b].s || fc.cells[b].t < fc.cells[a].t) continue;
        Elt c = static_cast<Elt>(1 + rng() % 6);
        for (size_t j = 0; j < N; ++j) D[a][j] = F.add(D[a][j], F.mul(c, D[b][j]));
        for (size_t i = 0; i < N; ++i) D[i][b] = F.sub(D[i][b], F.mul(c, D[i][a]));
    }
    fc.d.resize(N);
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j)
            if (D[i][j]) fc.d[i].emplace_back(static_cast<uint32_t>(j), D[i][j]);
    return fc;
}

} // namespace

TEST_CASE("synthetic filtered complexes: pages equal the planted pairing")
{
    for (uint64_t seed = 1; seed <= 12; ++seed) {
        std::vector<std::pair<size_t, size_t>> pairs;
        FilteredComplex fc = synthetic(seed, pairs);
        PageReport rep = run_pages(fc);
        CHECK(rep.converged);
        std::vector<Bar> planted;
        std::vector<bool> in(fc.cells.size(), false);
        for (auto [a, b] : pairs) {
            planted.push_back({a, b});
            in[a] = in[b] = true;
        }
        for (size_t k = 0; k < fc.cells.size(); ++k)
            if (!in[k]) planted.push_back({k, k});
        for (int r = 0; r <= rep.r_max; ++r)
            for (auto& c : fc.cells) CHECK(rep.dim(r, c.s, c.t, c.u) == oracle_dim(fc, planted, r, {c.s, c.t, c.u}));
        compare_with_oracle(fc, rep, false);
        check_page_identities(fc, rep);
        int last = 0;
        for (auto [a, b] : pairs) last = std::max<int>(last, static_cast<int>(fc.cells[b].t - fc.cells[a].t));
        CHECK(rep.collapse_page == last + 1);
    }
}

TEST_CASE("zero differential: every page is E_0")
{
    FilteredComplex fc;
    fc.F = Field::create(5);
    for (int k = 0; k < 10; ++k) fc.cells.push_back({k % 3, k % 4, 0, 0, 0});
    fc.d.resize(fc.cells.size());
    PageReport rep = run_pages(fc);
    CHECK(rep.collapse_page == 1);
    CHECK(rep.nonzero_differentials.empty());
    for (int r = 0; r <= rep.r_max; ++r) CHECK(rep.total(r) == 10);
}

TEST_CASE("first-subscript spectral sequence of gl_n against the pairing oracle")
{
    for (auto [n, p] : std::vector<std::pair<int, uint64_t>>{{1, 3}, {2, 11}, {3, 19}}) {
        FieldPtr F = Field::create(p);
        Complex gl = build_gl(n, F, p);
        FilteredComplex fc = filter_first_subscript(gl);
        PageReport rep = run_pages(fc);
        CHECK(rep.converged);
        compare_with_oracle(fc, rep, false);
        check_page_identities(fc, rep);
        // E_1 is the cohomology of the eps = 0 fiber.
        CHECK(rep.total(1) == betti(build_deformed(n, p, F, EpsMode::singular())).total());
        CHECK(rep.total(rep.r_max) == (uint64_t(1) << n));
        PageReport crit = run_pages(critical_block(fc));
        CHECK(crit.collapse_page == 1);
        CHECK(crit.total(1) == (uint64_t(1) << n));
        if (n >= 2) CHECK(!rep.nonzero_differentials.empty());
    }
}

TEST_CASE("lattice spectral sequences against the pairing oracle on the truncation")
{
    for (int n = 1; n <= 2; ++n) {
        uint64_t p = next_prime_above(2ull * n * n);
        FieldPtr F = Field::create(p);
        for (bool core : {true, false}) {
            KummerConnection conn = KummerConnection::sigma(n);
            Lattice L = core ? core_build(conn, F) : medial_build(conn, F);
            FilteredComplex fc = filter_lattice(L, 6);
            PageReport rep = run_pages(fc);
            compare_with_oracle(fc, rep, true);
        }
    }
}

TEST_CASE("a non-closed lattice is refused")
{
    FieldPtr F = Field::create(19);
    Lattice L = core_build(KummerConnection::semilinear(3, 19), F);
    REQUIRE(L.closure);
    CHECK_THROWS_AS(filter_lattice(L, 4), std::domain_error);
}

TEST_CASE("sigma core monodromy sequences collapse and E_1 is the fixed fiber")
{
    for (int n = 1; n <= 3; ++n) {
        uint64_t p = next_prime_above(2ull * n * n);
        FieldPtr F = Field::create(p);
        MonodromyReport mr = monodromy_ss(core_build(KummerConnection::sigma(n), F), 6);
        CHECK(mr.homogeneous);
        CHECK(mr.collapses);
        CHECK(mr.e1_matches_fiber);
    }
}
