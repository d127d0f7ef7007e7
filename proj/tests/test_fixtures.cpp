#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "stabfold/cli.hpp"
#include "stabfold/pages.hpp"
#include "stabfold/presentations.hpp"

using namespace stabfold;
using nlohmann::json;

namespace {

json load(const std::string& name)
{
    std::ifstream f(std::string(STABFOLD_DATA_DIR) + "/fixtures/" + name);
    REQUIRE(f.good());
    return json::parse(f);
}

} // namespace

TEST_CASE("worked presentations at heights 1 to 3")
{
    json fx = load("presentations.json");
    REQUIRE(fx.at("heights").size() == 3);
    for (auto& h : fx.at("heights")) {
        PresentationReport rep = check_presentation(h);
        CAPTURE(rep.to_text());
        CHECK(rep.ok());
        CHECK(rep.checks.size() == h.at("checks").size());
    }
}

TEST_CASE("presentation checks reject wrong identities")
{
    json fx = load("presentations.json");
    json h2 = fx.at("heights").at(1);
    auto with = [&](json check) {
        json h = h2;
        h["checks"] = json::array({check});
        return check_presentation(h);
    };
    CHECK(with({{"kind", "bundle"}, {"identity", "d(h20) = h10*h11"}}).ok());
    CHECK(!with({{"kind", "bundle"}, {"identity", "d(h20) = h11*h10"}}).ok());
    CHECK(!with({{"kind", "bundle"}, {"identity", "d(h10) = h10*h21 + h20*h10"}}).ok());
    CHECK(with({{"kind", "fiber0_zero"}, {"expr", "h10*g1 + h11*g0"}}).ok());
    CHECK(!with({{"kind", "fiber0_zero"}, {"expr", "h10*g1 - h11*g0"}}).ok());
    CHECK(!with({{"kind", "fiber0_zero"}, {"expr", "h10"}}).ok());
}

TEST_CASE("expression parser")
{
    FieldPtr F = Field::create(11);
    Complex b = build_deformed(2, 11, F, EpsMode::symbolic());
    ExprParser P(b);
    CHECK(P.parse("h[1,1]*h[1,2] + h[1,2]*h[1,1]").is_zero());
    CHECK(P.parse("d(d(h[2,1]))").is_zero());
    CHECK(P.parse("2*x^2*h[1,1] - x*x*h[1,1]*2").is_zero());
    CHECK(P.parse("-(h[2,1]h[1,1])") == P.parse("h[1,1]*h[2,1]"));
    CHECK_THROWS_AS(P.parse("h[1,1] +"), std::invalid_argument);
    CHECK_THROWS_AS(P.parse("unknown"), std::invalid_argument);
}

TEST_CASE("height-1 core and medial tables")
{
    json fx = load("height1.json");
    RunConfig cfg;
    cfg.command = "monodromy";
    cfg.n = fx.at("n");
    cfg.p = fx.at("p");
    cfg.flavor = fx.at("flavor");
    cfg.no_cache = true;
    for (std::string lattice : {"core", "medial"}) {
        cfg.lattice = lattice;
        CommandResult r = cmd_monodromy(cfg);
        std::map<int64_t, std::vector<std::string>> got;
        for (auto& row : r.json.at("filtration_table")) got[row.at("t")] = row.at("elements");
        for (auto& row : fx.at(lattice + "_table")) {
            auto want = row.at("elements").get<std::vector<std::string>>();
            std::sort(want.begin(), want.end());
            CHECK(got[row.at("t").get<int64_t>()] == want);
        }
    }
    FieldPtr F = Field::create(fx.at("p").get<uint64_t>());
    KummerConnection conn = KummerConnection::sigma(1);
    Lattice core = core_build(conn, F), med = medial_build(conn, F);
    std::vector<std::string> basis;
    for (auto& [b, a] : core.a) basis.push_back(format_lattice_element(core, b, a));
    CHECK(basis == fx.at("core_basis").get<std::vector<std::string>>());
    FilteredComplex fc = filter_lattice(core, 6), fm = filter_lattice(med, 6);
    auto ranks = e1_inclusion_rank(fc, fm);
    PageReport pm = run_pages(fm);
    for (auto& spot : fx.at("e1_not_surjective")) {
        int s = spot.at("s");
        int64_t t = spot.at("t");
        uint64_t target = 0;
        for (auto& e : pm.entries)
            if (e.r == 1 && e.s == s && e.t == t) target += e.dim;
        CHECK(target > 0);
        CHECK(ranks.at({s, t}) < target);
    }
}

TEST_CASE("containment fixture")
{
    json fx = load("containment.json");
    for (auto& c : fx.at("cases"))
        for (auto& p : c.at("primes")) {
            int n = c.at("n");
            CAPTURE(n);
            CAPTURE(p.get<uint64_t>());
            CHECK(containment_report(n, p).holds == c.at("holds").get<bool>());
        }
    for (auto& m : fx.at("monomials")) {
        int n = m.at("n");
        uint64_t p = m.at("p");
        Mono mono = parse_mono(m.at("mono"), n);
        CHECK((internal_degree(mono, n, p) == 0) == m.at("critical").get<bool>());
        CHECK((first_subscript_sum(mono, n) == 0) == m.at("fsc").get<bool>());
    }
}
