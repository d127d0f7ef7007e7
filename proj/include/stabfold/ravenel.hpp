#pragma once

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stabfold/exterior.hpp"
#include "stabfold/gf.hpp"
#include "stabfold/linalg.hpp"

namespace stabfold {

enum class Lie { ravenel, gl };
enum class Label { full, critical, fsc, custom };

std::string to_string(Lie l);
std::string to_string(Label l);

struct EpsMode {
    bool bundle = false;
    Elt eps = 0;
    static EpsMode fiber(Elt e) { return {false, e}; }
    static EpsMode singular() { return {false, 0}; }
    static EpsMode smooth() { return {false, 1}; }
    static EpsMode symbolic() { return {true, 0}; }
};

// One term of d(h_a)·: sign * eps^epow * h_a h_b, product written in the order a, b.
struct GenTerm {
    int a, b;
    int sign;
    int epow;
};

// Differential on generators, extended by the graded Leibniz rule.
class Dga {
public:
    static Dga deformed(int n);
    static Dga gl(int n);

    int n() const { return n_; }
    const std::vector<GenTerm>& terms(int slot) const { return gen_[slot]; }

    // emit(sign, epow, monomial) for every term of d(m).
    template <class Emit>
    void d_mono(Mono m, Emit&& emit) const
    {
        Mono rest_all = m;
        while (rest_all) {
            int s = std::countr_zero(rest_all);
            rest_all &= rest_all - 1;
            Mono rest = m & ~(Mono(1) << s);
            int pos_sign = (std::popcount(m & ((Mono(1) << s) - 1)) & 1) ? -1 : 1;
            for (const GenTerm& t : gen_[s]) {
                Mono ma = Mono(1) << t.a, mb = Mono(1) << t.b;
                if ((rest & ma) || (rest & mb) || t.a == t.b) continue;
                Wedge w1 = wedge(ma, mb);
                Wedge w2 = wedge(w1.mono, rest);
                emit(pos_sign * t.sign * w1.sign * w2.sign, t.epow, w2.mono);
            }
        }
    }

private:
    int n_ = 0;
    std::vector<std::vector<GenTerm>> gen_;
};

struct BlockKey {
    int s = 0;
    uint64_t u = 0;
    auto operator<=>(const BlockKey&) const = default;
};

// Finite-dimensional cochain complex split into (s, u) blocks; d maps block
// (s, u) to (s + 1, u). Rows of a differential index the source basis.
struct MatrixComplex {
    FieldPtr F;
    std::map<BlockKey, size_t> dims;
    std::map<BlockKey, SparseMatrix> d;
    size_t dim(const BlockKey& k) const
    {
        auto it = dims.find(k);
        return it == dims.end() ? 0 : it->second;
    }
    const SparseMatrix* diff(const BlockKey& k) const
    {
        auto it = d.find(k);
        return it == d.end() ? nullptr : &it->second;
    }
};

struct Descriptor {
    int n = 1;
    uint64_t p = 2;
    FieldPtr F;
    EpsMode eps;
    Lie lie = Lie::ravenel;
    Label label = Label::full;
    std::string custom_name;
};

// A labelled sub-DGA of the exterior algebra with a monomial basis.
class Complex {
public:
    using Predicate = std::function<bool(Mono)>;

    Complex(Descriptor desc, Predicate keep = nullptr);

    const Descriptor& desc() const { return desc_; }
    const Dga& dga() const { return dga_; }
    const FieldPtr& field() const { return desc_.F; }
    int n() const { return desc_.n; }
    bool bundle() const { return desc_.eps.bundle; }

    uint64_t grade(Mono m) const { return grading_.of(m); }
    uint64_t grade_modulus() const { return grading_.modulus; }
    bool contains(Mono m) const { return index_.count(m) != 0; }
    // (block, position) of a basis monomial.
    std::pair<BlockKey, uint32_t> locate(Mono m) const;

    const std::vector<BlockKey>& keys() const { return keys_; }
    const std::vector<Mono>& basis(const BlockKey& k) const;
    size_t total_dim() const { return total_; }
    std::vector<Mono> all_monomials() const;

    // Fiber differential of a basis monomial.
    Cochain d(Mono m) const;
    Cochain d(const Cochain& z) const;
    // Bundle differential (coefficients in F[x]); valid in either mode,
    // the fiber parameter is ignored.
    PolyCochain d_bundle(Mono m) const;
    PolyCochain d_bundle(const PolyCochain& z) const;

    // Matrices of the fiber differential; requires fiber mode.
    const MatrixComplex& matrices() const;
    SparseMatrix block_matrix(const BlockKey& k) const;

private:
    Descriptor desc_;
    Dga dga_;
    Grading grading_;
    std::vector<BlockKey> keys_;
    std::map<BlockKey, std::vector<Mono>> basis_;
    std::unordered_map<Mono, std::pair<BlockKey, uint32_t>> index_;
    size_t total_ = 0;
    struct Lazy;
    std::shared_ptr<Lazy> lazy_;
};

Complex build_deformed(int n, uint64_t p, FieldPtr F, EpsMode eps);
// Asserts agreement with build_deformed at eps = 1 term for term.
Complex build_gl(int n, FieldPtr F, uint64_t p_for_grading);
// Closure under d is asserted.
Complex subcomplex(const Complex& c, Label which);
// Builds directly from a descriptor and predicate, asserting closure under d.
Complex closed_complex(Descriptor desc, Complex::Predicate keep);
Complex subcomplex_custom(const Complex& c, const std::string& name, Complex::Predicate keep);

struct Containment {
    bool holds = true;
    std::optional<Mono> witness;
    uint64_t scanned = 0;
};
Containment containment_report(int n, uint64_t p);
// Every critical monomial outside the first-subscript complex.
std::vector<Mono> containment_witnesses(int n, uint64_t p);

struct LabelCounts {
    uint64_t critical = 0, fsc = 0, full = 0;
};
// Raw bitmask scan; no complex is materialized.
LabelCounts label_counts(int n, uint64_t p);

// sigma(h_{i,j}) = h_{i,j+1}; in semilinear mode coefficients are moved through
// an order-n power of Frobenius.
Cochain sigma_apply(const Complex& c, const Cochain& z, bool semilinear);
PolyCochain sigma_apply(const Complex& c, const PolyCochain& z, bool semilinear);

} // namespace stabfold
