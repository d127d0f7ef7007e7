#pragma once

#include <climits>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "stabfold/homology.hpp"
#include "stabfold/kummer.hpp"
#include "stabfold/ravenel.hpp"

namespace stabfold {

// A finite complex with a decreasing filtration: d never lowers t.
struct FilteredComplex {
    struct Cell {
        int s;
        int64_t t;
        uint64_t u;
        Mono mono;
        int64_t xpow; // 0 for fiber complexes
    };
    FieldPtr F;
    int n = 1;
    std::vector<Cell> cells;
    std::vector<SparseRow> d;          // row per cell, columns are cell indices
    int64_t trusted_max = INT64_MAX;   // truncation level for lattice sequences
    std::string name;

    int64_t t_min() const;
    int64_t t_max() const;
};

// Filtration i_1 + ... + i_m on CE(gl_n); asserts the associated graded is CE(L(n,n)).
FilteredComplex filter_first_subscript(const Complex& gl);
// The u = 0 summand.
FilteredComplex critical_block(const FilteredComplex& fc);
// Restricts a fiber complex with filtration function; used for oracles.
FilteredComplex filter_by(const Complex& c, const std::function<int64_t(Mono)>& t, const std::string& name);
// x^e b with filtration e - a(b) up to t_max; the quotient by F^(t_max + 1).
// Throws std::domain_error when the lattice is not closed under d.
FilteredComplex filter_lattice(const Lattice& L, int64_t t_max);

struct PageEntry {
    int r;
    int s;
    int64_t t;
    uint64_t u;
    uint64_t dim;
    uint64_t rank_out; // rank of d_r leaving this spot
};

struct PageReport {
    std::string name;
    int r_max = 0;
    bool converged = false; // r_max exceeds the filtration span
    std::vector<PageEntry> entries; // nonzero dims only, r = 0..r_max
    // First r >= 1 after which every d_r vanishes; 0 when none was found.
    int collapse_page = 0;
    std::vector<std::string> nonzero_differentials; // "d_r: (s,t,u)" audit lines

    uint64_t dim(int r, int s, int64_t t, uint64_t u) const;
    uint64_t total(int r) const;
    std::map<std::pair<int, uint64_t>, uint64_t> column_totals(int r) const; // (s, u) -> sum over t
    nlohmann::json to_json() const;
};

// d_r: E_r^{s,t} -> E_r^{s+1,t+r}. r_max < 0 runs until convergence.
PageReport run_pages(const FilteredComplex& fc, int r_max = -1);

struct MonodromyReport {
    PageReport pages;
    bool homogeneous = false;
    bool collapses = false;
    std::vector<uint64_t> fiber_betti;   // H^s of the fixed fiber at 1
    bool e1_matches_fiber = false;       // every trusted t >= 0 column equals fiber_betti
};
MonodromyReport monodromy_ss(const Lattice& L, int64_t t_max);

// Rank of the E_1 map induced by an inclusion of filtered complexes whose cells
// are matched by (mono, xpow); keyed by (s, t), with every spot of super present.
std::map<std::pair<int, int64_t>, uint64_t> e1_inclusion_rank(const FilteredComplex& sub, const FilteredComplex& super);

} // namespace stabfold
