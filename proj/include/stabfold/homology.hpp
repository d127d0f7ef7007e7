#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "stabfold/linalg.hpp"
#include "stabfold/ravenel.hpp"

namespace stabfold {

struct BettiTable {
    std::map<BlockKey, uint64_t> entries; // every block, zeros included
    int top_degree = 0;

    uint64_t at(const BlockKey& k) const;
    std::vector<uint64_t> totals() const; // indexed by s = 0..top_degree
    uint64_t total() const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
    bool operator==(const BettiTable& o) const { return entries == o.entries; }
};

BettiTable betti(const MatrixComplex& mc, int top_degree, RankMethod method = RankMethod::automatic);
BettiTable betti(const Complex& c, RankMethod method = RankMethod::automatic);
// d^s ranks per source block.
std::map<BlockKey, uint64_t> block_ranks(const MatrixComplex& mc, RankMethod method = RankMethod::automatic);

// Poincare polynomial coefficients of the exterior algebra on generators of the given degrees.
std::vector<uint64_t> exterior_profile(const std::vector<int>& degrees, int top_degree);

// Class coordinates over the representatives of each block; zero blocks omitted.
using ClassVector = std::map<BlockKey, std::vector<Elt>>;

class CohomologyBasis {
public:
    explicit CohomologyBasis(const Complex& c);

    const Complex& complex() const { return *c_; }
    size_t dim(const BlockKey& k) const;
    std::vector<BlockKey> keys() const; // blocks with nonzero cohomology
    const std::vector<Cochain>& representatives(const BlockKey& k) const;
    ClassVector basis_class(const BlockKey& k, size_t idx) const;
    Cochain lift(const ClassVector& v) const;
    // Throws std::invalid_argument when z is not a cocycle.
    ClassVector classify(const Cochain& z) const;
    // Reduces a cocycle modulo coboundaries and representatives; the
    // remainder is returned in rem and is zero for cocycles.
    std::vector<Elt> reduce(const BlockKey& k, std::vector<Elt> coords, std::vector<Elt>* rem = nullptr) const;

private:
    struct Block {
        DenseMatrix echelon;        // coboundary rows then representative rows, reduced
        std::vector<size_t> pivots; // pivot column per echelon row
        size_t boundary_rows = 0;
        std::vector<Cochain> reps;
    };
    const Complex* c_;
    std::map<BlockKey, Block> blocks_;
};

ClassVector class_add(const Field& F, const ClassVector& a, const ClassVector& b);
ClassVector class_scale(const Field& F, const ClassVector& a, Elt s);
bool class_is_zero(const ClassVector& a);
ClassVector cup(const CohomologyBasis& H, const ClassVector& a, const ClassVector& b);

struct RingCheck {
    bool ok = false;
    std::vector<ClassVector> generators;
    std::string diagnostic;
};
RingCheck exterior_ring_check(const CohomologyBasis& H, const std::vector<int>& expected_degrees);

struct ChainMap {
    const Complex* source;
    const Complex* target;
    std::function<Cochain(Mono)> apply;
};

struct InducedRank {
    std::map<BlockKey, uint64_t> per_block; // keyed by source block
    std::vector<uint64_t> per_degree;
};
// Asserts f d = d f on every source basis monomial.
InducedRank induced_map_rank(const ChainMap& f, const CohomologyBasis& Hs, const CohomologyBasis& Ht);
bool is_quasi_isomorphism(const InducedRank& r, const BettiTable& a, const BettiTable& b);
bool is_surjective(const InducedRank& r, const BettiTable& target);

} // namespace stabfold
