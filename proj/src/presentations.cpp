#include "stabfold/presentations.hpp"

#include <cctype>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stabfold/homology.hpp"
#include "stabfold/kummer.hpp"

namespace stabfold {

ExprParser::ExprParser(const Complex& bundle, const std::map<std::string, PolyCochain>* names)
    : c_(&bundle), names_(names)
{
    if (!bundle.bundle()) throw std::invalid_argument("expressions are evaluated in the bundle complex");
}

namespace {

struct Cursor {
    const std::string& s;
    size_t i = 0;
    void skip()
    {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char ch)
    {
        skip();
        if (i < s.size() && s[i] == ch) {
            ++i;
            return true;
        }
        return false;
    }
    char peek()
    {
        skip();
        return i < s.size() ? s[i] : '\0';
    }
    [[noreturn]] void fail(const std::string& why) const
    {
        throw std::invalid_argument(why + " at position " + std::to_string(i) + " in '" + s + "'");
    }
    int64_t integer()
    {
        skip();
        size_t st = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (st == i) fail("integer expected");
        return std::stoll(s.substr(st, i - st));
    }
};

struct Impl {
    const Complex& c;
    const std::map<std::string, PolyCochain>* names;
    Cursor& cur;
    FieldPtr F = c.field();
    int n = c.n();

    PolyCochain scalar(const Poly& p) const
    {
        PolyCochain z(F);
        z.add_term(0, p);
        return z;
    }

    PolyCochain expr()
    {
        PolyCochain acc(F);
        bool neg = false;
        if (cur.eat('-')) neg = true;
        else cur.eat('+');
        for (;;) {
            PolyCochain t = term();
            acc = neg ? acc - t : acc + t;
            if (cur.eat('+')) neg = false;
            else if (cur.eat('-')) neg = true;
            else break;
        }
        return acc;
    }

    PolyCochain term()
    {
        PolyCochain acc = factor();
        while (cur.eat('*')) acc = acc.wedge(factor());
        return acc;
    }

    PolyCochain factor()
    {
        char ch = cur.peek();
        if (ch == '(') {
            cur.eat('(');
            PolyCochain z = expr();
            if (!cur.eat(')')) cur.fail("')' expected");
            return z;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) return scalar(Poly::constant(F, F->from_int(cur.integer())));
        if (cur.eat('-')) return PolyCochain(F) - factor();
        if (!std::isalpha(static_cast<unsigned char>(ch))) cur.fail("factor expected");
        size_t st = cur.i;
        if (cur.s.compare(st, 2, "h[") == 0) {
            size_t e = st;
            while (cur.s.compare(e, 2, "h[") == 0) {
                size_t close = cur.s.find(']', e);
                if (close == std::string::npos) cur.fail("']' expected");
                e = close + 1;
            }
            Wedge w = parse_mono_signed(cur.s.substr(st, e - st), n);
            cur.i = e;
            return PolyCochain::of(F, w.mono, w.sign < 0 ? F->neg(1) : 1);
        }
        size_t e = st;
        while (e < cur.s.size() && (std::isalnum(static_cast<unsigned char>(cur.s[e])) || cur.s[e] == '_')) ++e;
        std::string word = cur.s.substr(st, e - st);
        cur.i = e;
        if (word == "x") {
            unsigned k = 1;
            if (cur.eat('^')) k = static_cast<unsigned>(cur.integer());
            return scalar(Poly::monomial(F, 1, k));
        }
        if (word == "d" && cur.peek() == '(') {
            cur.eat('(');
            PolyCochain z = expr();
            if (!cur.eat(')')) cur.fail("')' expected");
            return c.d_bundle(z);
        }
        if (names)
            if (auto it = names->find(word); it != names->end()) return it->second;
        cur.i = st;
        cur.fail("unknown name '" + word + "'");
    }
};

} // namespace

PolyCochain ExprParser::parse(const std::string& text) const
{
    Cursor cur{text};
    Impl impl{*c_, names_, cur};
    PolyCochain z = impl.expr();
    cur.skip();
    if (cur.i != text.size()) cur.fail("trailing input");
    return z;
}

bool PresentationReport::ok() const
{
    for (auto& c : checks)
        if (!c.pass) return false;
    return true;
}

nlohmann::json PresentationReport::to_json() const
{
    nlohmann::json els = nlohmann::json::array(), cs = nlohmann::json::array();
    for (auto& [name, form, d] : elements) els.push_back({{"name", name}, {"expr", form}, {"d", d}});
    for (auto& c : checks)
        cs.push_back({{"kind", c.kind}, {"statement", c.statement}, {"pass", c.pass}, {"detail", c.detail}});
    return {{"n", n}, {"p", p}, {"elements", els}, {"checks", cs}, {"ok", ok()}};
}

std::string PresentationReport::to_text() const
{
    std::ostringstream o;
    o << "height " << n << " (p = " << p << ")\n";
    for (auto& [name, form, d] : elements) o << "  " << name << " = " << form << "\n    d = " << d << "\n";
    for (auto& c : checks) {
        o << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.kind << ": " << c.statement;
        if (!c.detail.empty()) o << "  (" << c.detail << ")";
        o << "\n";
    }
    return o.str();
}

namespace {

std::string show(const PolyCochain& z, int n) { return z.is_zero() ? "0" : z.to_string(n); }

// Flattened class coordinates for span computations.
struct ClassSpace {
    const CohomologyBasis& H;
    std::map<BlockKey, size_t> offset;
    size_t total = 0;

    explicit ClassSpace(const CohomologyBasis& h) : H(h)
    {
        for (auto& k : H.keys()) {
            offset[k] = total;
            total += H.dim(k);
        }
    }
    std::vector<Elt> flat(const ClassVector& v) const
    {
        std::vector<Elt> out(total, 0);
        for (auto& [k, cs] : v)
            for (size_t i = 0; i < cs.size(); ++i) out[offset.at(k) + i] = cs[i];
        return out;
    }
};

// Dimension of the subalgebra of H generated by the given classes.
size_t generated_dim(const CohomologyBasis& H, const std::vector<ClassVector>& gens, const ClassVector& one)
{
    const Field& F = *H.complex().field();
    ClassSpace sp(H);
    DenseMatrix basis(0, sp.total);
    std::vector<ClassVector> queue{one};
    auto independent = [&](const ClassVector& v) {
        if (class_is_zero(v)) return false;
        DenseMatrix row(1, sp.total);
        row.a = sp.flat(v);
        DenseMatrix st = vstack(basis, row);
        if (rank_dense(F, st) == basis.rows) return false;
        basis = st;
        return true;
    };
    independent(one);
    for (size_t q = 0; q < queue.size(); ++q)
        for (auto& g : gens) {
            ClassVector w = cup(H, queue[q], g);
            if (independent(w)) queue.push_back(w);
        }
    return basis.rows;
}

Mono single_monomial(const PolyCochain& z, const std::string& name)
{
    if (z.terms().size() != 1) throw std::invalid_argument(name + " is not a single monomial");
    return z.terms().begin()->first;
}

} // namespace

PresentationReport check_presentation(const nlohmann::json& h)
{
    PresentationReport rep;
    rep.n = h.at("n").get<int>();
    rep.p = h.at("p").get<uint64_t>();
    const int n = rep.n;
    FieldPtr F = Field::create(rep.p);
    Complex bundle = build_deformed(n, rep.p, F, EpsMode::symbolic());
    std::map<std::string, PolyCochain> names;
    for (auto& e : h.at("elements")) {
        ExprParser parser(bundle, &names);
        std::string name = e.at("name").get<std::string>();
        PolyCochain z = parser.parse(e.at("expr").get<std::string>());
        names[name] = z;
        rep.elements.emplace_back(name, show(z, n), show(bundle.d_bundle(z), n));
    }
    ExprParser parser(bundle, &names);

    std::unique_ptr<Complex> fiber0;
    std::unique_ptr<CohomologyBasis> H0;
    auto need_fiber = [&] {
        if (!fiber0) {
            fiber0 = std::make_unique<Complex>(build_deformed(n, rep.p, F, EpsMode::singular()));
            H0 = std::make_unique<CohomologyBasis>(*fiber0);
        }
    };

    for (auto& c : h.at("checks")) {
        PresentationCheck pc;
        pc.kind = c.at("kind").get<std::string>();
        try {
            if (pc.kind == "bundle") {
                pc.statement = c.at("identity").get<std::string>();
                size_t eq = pc.statement.find('=');
                if (eq == std::string::npos) throw std::invalid_argument("identity needs '='");
                PolyCochain lhs = parser.parse(pc.statement.substr(0, eq));
                PolyCochain rhs = parser.parse(pc.statement.substr(eq + 1));
                pc.pass = lhs == rhs;
                if (!pc.pass) pc.detail = "lhs = " + show(lhs, n) + ", rhs = " + show(rhs, n);
            } else if (pc.kind == "fiber0_zero" || pc.kind == "fiber0_nonzero") {
                need_fiber();
                pc.statement = c.at("expr").get<std::string>();
                Cochain z = parser.parse(pc.statement).evaluate(0);
                if (!fiber0->d(z).is_zero()) {
                    pc.detail = "not a cocycle at eps = 0";
                } else {
                    bool zero = class_is_zero(H0->classify(z));
                    pc.pass = (pc.kind == "fiber0_zero") == zero;
                    pc.detail = zero ? "class is zero" : "class is nonzero";
                }
            } else if (pc.kind == "fiber0_generate" || pc.kind == "fiber0_fixed_generate") {
                need_fiber();
                std::vector<ClassVector> gens;
                std::string list;
                bool fixed_ok = true;
                KummerConnection conn = KummerConnection::sigma(n);
                if (pc.kind == "fiber0_fixed_generate" && c.value("flavor", "sigma") == "semilinear")
                    conn = KummerConnection::semilinear(n, rep.p);
                for (auto& g : c.at("generators")) {
                    std::string s = g.get<std::string>();
                    list += (list.empty() ? "" : ", ") + s;
                    Cochain z = parser.parse(s).evaluate(0);
                    for (auto& [m, v] : z.terms()) fixed_ok = fixed_ok && conn.fixed(m);
                    gens.push_back(H0->classify(z));
                }
                ClassVector one = H0->classify(Cochain::of(F, 0));
                size_t got = generated_dim(*H0, gens, one);
                uint64_t want = betti(*fiber0).total();
                if (pc.kind == "fiber0_fixed_generate") {
                    Complex fx = subcomplex_custom(*fiber0, "fixed", [&conn](Mono m) { return conn.fixed(m); });
                    want = betti(fx).total();
                    pc.statement = "T-fixed cohomology generated by " + list;
                    pc.pass = fixed_ok && got == want;
                    if (!fixed_ok) pc.detail = "a generator is not T-fixed";
                } else {
                    pc.statement = "cohomology generated by " + list;
                    pc.pass = got == want;
                }
                if (pc.detail.empty()) pc.detail = "span " + std::to_string(got) + " of " + std::to_string(want);
            } else if (pc.kind == "spans") {
                std::string which = c.at("complex").get<std::string>();
                Label lab = which == "cc" ? Label::critical : which == "fsc" ? Label::fsc : Label::full;
                Complex fiber1 = build_deformed(n, rep.p, F, EpsMode::smooth());
                Complex sub = subcomplex(fiber1, lab);
                std::vector<Mono> gens;
                std::string list;
                for (auto& g : c.at("products_of")) {
                    std::string s = g.get<std::string>();
                    list += (list.empty() ? "" : ", ") + s;
                    gens.push_back(single_monomial(parser.parse(s), s));
                }
                std::set<Mono> prods;
                for (uint64_t sel = 0; sel < (uint64_t(1) << gens.size()); ++sel) {
                    Mono m = 0;
                    bool ok = true;
                    for (size_t k = 0; k < gens.size(); ++k)
                        if (sel >> k & 1) {
                            if (m & gens[k]) ok = false;
                            m |= gens[k];
                        }
                    if (ok) prods.insert(m);
                }
                auto all = sub.all_monomials();
                std::set<Mono> have(all.begin(), all.end());
                pc.statement = which + " spanned by products of " + list;
                pc.pass = prods == have;
                pc.detail = std::to_string(prods.size()) + " products, " + std::to_string(have.size()) + " basis monomials";
            } else if (pc.kind == "core_exponent") {
                std::string flavor = c.at("flavor").get<std::string>();
                std::string el = c.at("element").get<std::string>();
                KummerConnection conn = flavor == "sigma" ? KummerConnection::sigma(n) : KummerConnection::semilinear(n, rep.p);
                Mono b = single_monomial(parser.parse(el), el);
                int64_t want = 0, pk = 1;
                for (auto& co : c.at("exponent_in_p")) {
                    want += co.get<int64_t>() * pk;
                    pk *= static_cast<int64_t>(rep.p);
                }
                int64_t got = conn.fixed(b) ? -conn.param(b).numerator() : -1;
                pc.statement = flavor + " core exponent of " + el + " = " + std::to_string(want);
                pc.pass = got == want;
                pc.detail = "engine " + std::to_string(got);
            } else {
                throw std::invalid_argument("unknown check kind '" + pc.kind + "'");
            }
        } catch (const std::exception& ex) {
            pc.pass = false;
            pc.detail = ex.what();
        }
        rep.checks.push_back(std::move(pc));
    }
    return rep;
}

} // namespace stabfold
