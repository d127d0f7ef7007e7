#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "json.hpp"

#include "stabfold/ravenel.hpp"

namespace stabfold {

using Rational = boost::rational<int64_t>;

enum class Flavor { sigma, semilinear, custom };
std::string to_string(Flavor f);

struct KummerConnection {
    int n = 1;
    uint64_t p = 2;
    Flavor flavor = Flavor::custom;
    std::vector<Rational> params; // per slot

    // alpha(h_{i,j}) = -i/n.
    static KummerConnection sigma(int n);
    // alpha(h_{i,j}) = -p^j (p^i - 1)/(p^n - 1), j in 1..n.
    static KummerConnection semilinear(int n, uint64_t p);
    static KummerConnection custom(int n, std::vector<Rational> params);
    static KummerConnection from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    Rational param(Mono m) const;
    // lcm of the generator denominators.
    int64_t denominator() const;
    bool fixed(Mono m) const { return param(m).denominator() == 1; }
    // D * alpha(m), an integer.
    int64_t exponent(Mono m) const;
};

// Monodromy acting diagonally: T(b) = omega^(D alpha(b)) b.
struct Monodromy {
    int64_t D = 1;
    Elt omega = 1;
    FieldPtr F;
    KummerConnection conn;
    Elt eigenvalue(Mono m) const;
    Cochain apply(const Cochain& z) const;
};
// Throws std::invalid_argument when omega does not have order D.
Monodromy monodromy(const KummerConnection& conn, FieldPtr F, Elt omega);
// Verifies T d = d T on every basis monomial of a fiber.
bool commutes_with_d(const Monodromy& T, const Complex& fiber);
// Fixed monomials, in bitmask order, among all 2^(n^2).
std::vector<Mono> fixed_monomials(const KummerConnection& conn);

// h-diagonal isomorphism f(h_{i,j}) = alpha_{i,j} h_{i,j} between fibers.
struct Transport {
    int n = 1;
    FieldPtr F;
    Elt eps = 1, delta = 1;
    std::vector<Elt> x;     // per second subscript, empty for root-built transports
    std::vector<Elt> alpha; // per slot
    Elt scalar(Mono m) const;
    Cochain apply(const Cochain& z) const;
};

enum class SolveMode { all, sigma, semilinear };
// For semilinear mode q is the Frobenius base: x_{j+1} = x_j^q.
std::vector<Transport> solve_h_diagonal(int n, const FieldPtr& F, Elt eps, Elt delta, SolveMode mode, uint64_t q = 0);
// f d_eps = d_delta f on generators.
bool verify_transport(const Transport& t);
// f d_eps = d_delta f on every monomial.
bool verify_transport_full(const Transport& t);
// Generator scalars zeta^(D alpha); requires zeta^D = eps/delta.
Transport transport_from_root(const KummerConnection& conn, const FieldPtr& F, Elt eps, Elt delta, Elt zeta);
// First eps -> delta, then delta -> gamma.
Transport compose(const Transport& first, const Transport& second);

struct LatticeWitness {
    Mono source = 0, target = 0;
    int64_t shift = 0; // filtration change of the term
};

// The F[x]-lattice spanned by x^e b with e >= lower(b), b a fixed monomial.
// Ambient filtration of x^e b is e - a(b), a = -alpha.
struct Lattice {
    enum class Kind { core, medial } kind = Kind::core;
    KummerConnection conn;
    std::shared_ptr<const Complex> fixed; // bundle mode
    std::map<Mono, int64_t> a;
    // First term of d leaving the core (or lowering the medial filtration).
    std::optional<LatticeWitness> closure;

    int64_t lower_exponent(Mono b) const { return kind == Kind::core ? a.at(b) : 0; }
    int64_t filtration(Mono b, int64_t e) const { return e - a.at(b); }
    int64_t min_filtration() const;
};

// Bundle complex restricted to T-fixed monomials.
std::shared_ptr<const Complex> fixed_bundle(const KummerConnection& conn, const FieldPtr& F);
// A non-closed core is returned with its witness recorded, not rejected.
Lattice core_build(const KummerConnection& conn, const FieldPtr& F);
Lattice medial_build(const KummerConnection& conn, const FieldPtr& F);
// First term of d that leaves the lattice, if any.
std::optional<LatticeWitness> closure_failure(const Lattice& L);

struct Homogeneity {
    bool holds = true;
    std::optional<LatticeWitness> witness;
};
Homogeneity core_homogeneity(const Lattice& core);

// Core differential at x = 1 against the fiber-at-1 fixed complex, monomial for monomial.
bool core_at_one_matches(const Lattice& core, const Complex& fixed_fiber_at_one);

std::string format_lattice_element(const Lattice& L, Mono b, int64_t e);

} // namespace stabfold
