#include "stabfold/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include <openssl/evp.h>

#include "CLI11.hpp"

#include "stabfold/homology.hpp"
#include "stabfold/kummer.hpp"
#include "stabfold/pages.hpp"
#include "stabfold/parallel.hpp"
#include "stabfold/presentations.hpp"
#include "stabfold/ravenel.hpp"

#ifndef STABFOLD_DATA_DIR
#define STABFOLD_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace stabfold {

uint64_t RunConfig::prime() const { return p ? p : next_prime_above(2ull * n * n); }

void RunConfig::validate() const
{
    auto one_of = [](const std::string& v, std::initializer_list<const char*> opts, const char* what) {
        for (const char* o : opts)
            if (v == o) return;
        throw std::invalid_argument(std::string("bad ") + what + " '" + v + "'");
    };
    if (n < 1 || n > 7) throw std::invalid_argument("n must be in 1..7");
    if (n_max < 1 || n_max > 7) throw std::invalid_argument("n-max must be in 1..7");
    if (p && !is_prime(p)) throw std::invalid_argument("p must be prime");
    if (ext > 12) throw std::invalid_argument("extension degree too large");
    one_of(lie, {"ravenel", "gl"}, "lie");
    one_of(complex, {"full", "cc", "fsc"}, "complex");
    one_of(flavor, {"sigma", "semilinear", "custom"}, "flavor");
    one_of(lattice, {"core", "medial"}, "lattice");
    one_of(method, {"auto", "dense", "sparse"}, "method");
    one_of(format, {"text", "json", "csv"}, "format");
    if (flavor == "custom" && flavor_file.empty()) throw std::invalid_argument("flavor custom needs a connection file");
    if (epsilon != "x") {
        if (epsilon.empty() || epsilon.find_first_not_of("-0123456789") != std::string::npos)
            throw std::invalid_argument("epsilon must be an integer or x");
    }
    if (t_max < 0 || t_max > 64) throw std::invalid_argument("t-max must be in 0..64");
}

json RunConfig::canonical() const
{
    json j;
    j["command"] = command;
    j["suite"] = suite;
    j["n"] = command == "dims" ? n_max : n;
    j["p"] = prime();
    j["ext"] = ext;
    j["epsilon"] = epsilon;
    j["lie"] = lie;
    j["complex"] = complex;
    j["flavor"] = flavor;
    if (flavor == "custom") {
        std::ifstream f(flavor_file);
        std::stringstream ss;
        ss << f.rdbuf();
        j["connection_sha256"] = sha256_hex(ss.str());
    }
    j["lattice"] = lattice;
    j["r_max"] = r_max;
    j["t_max"] = t_max;
    j["slow"] = slow;
    return j;
}

std::string RunConfig::hash() const { return sha256_hex(canonical().dump()); }

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, data.data(), data.size());
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

ResultCache::ResultCache(std::string root) : root_(std::move(root)) {}

std::string ResultCache::path_for(const RunConfig& cfg) const { return (fs::path(root_) / (cfg.hash() + ".json")).string(); }

std::optional<json> ResultCache::load(const RunConfig& cfg) const
{
    std::ifstream f(path_for(cfg));
    if (!f) return std::nullopt;
    try {
        json j = json::parse(f);
        if (j.value("schema", -1) != kCacheSchema || j.value("version", "") != kVersion) return std::nullopt;
        if (j.at("config") != cfg.canonical()) return std::nullopt;
        return j.at("result");
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void ResultCache::store(const RunConfig& cfg, const json& result) const
{
    fs::create_directories(root_);
    json j{{"schema", kCacheSchema}, {"version", kVersion}, {"config", cfg.canonical()}, {"result", result}};
    std::string dst = path_for(cfg);
    std::string tmp = dst + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp);
        f << j.dump() << "\n";
        if (!f) throw std::runtime_error("cannot write cache file " + tmp);
    }
    fs::rename(tmp, dst);
}

std::string default_cache_root(const RunConfig& cfg)
{
    if (!cfg.cache_dir.empty()) return cfg.cache_dir;
    if (const char* env = std::getenv("STABFOLD_CACHE"); env && *env) return env;
    return ".stabfold-cache";
}

namespace {

std::string data_dir(const RunConfig& cfg) { return cfg.data_dir.empty() ? STABFOLD_DATA_DIR : cfg.data_dir; }

json read_json(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return json::parse(f);
}

EpsMode parse_eps(const RunConfig& cfg, const Field& F)
{
    if (cfg.epsilon == "x") return EpsMode::symbolic();
    return EpsMode::fiber(F.from_int(std::stoll(cfg.epsilon)));
}

RankMethod parse_method(const std::string& m)
{
    return m == "dense" ? RankMethod::dense : m == "sparse" ? RankMethod::sparse : RankMethod::automatic;
}

Label parse_label(const std::string& c) { return c == "cc" ? Label::critical : c == "fsc" ? Label::fsc : Label::full; }

KummerConnection connection_of(const RunConfig& cfg)
{
    if (cfg.flavor == "sigma") return KummerConnection::sigma(cfg.n);
    if (cfg.flavor == "semilinear") return KummerConnection::semilinear(cfg.n, cfg.prime());
    KummerConnection c = KummerConnection::from_json(read_json(cfg.flavor_file));
    if (c.n != cfg.n) throw std::invalid_argument("connection file is for n = " + std::to_string(c.n));
    return c;
}

struct DimsRow {
    uint64_t cc, fsc, full;
};
// Expected rows for n = 1..5.
const DimsRow kExpectedDims[] = {
    {2, 2, 2}, {8, 8, 16}, {80, 176, 512}, {2432, 16384, 65536}, {247552, 6710912, 33554432}};

} // namespace

CommandResult cmd_dims(const RunConfig& cfg)
{
    CommandResult r;
    json rows = json::array();
    std::ostringstream text, csv;
    text << " n        cc       fsc      full   cc/2^n  fsc/2^n full/2^n  expected\n";
    csv << "n,cc,fsc,full,cc_quotient,fsc_quotient,full_quotient\n";
    for (int n = 1; n <= cfg.n_max; ++n) {
        if (n > 5) std::cerr << "warning: n = " << n << " scans 2^" << n * n << " masks\n";
        LabelCounts c = label_counts(n, next_prime_above(2ull * n * n));
        uint64_t q = uint64_t(1) << n;
        std::string status = "n/a";
        if (n <= 5) {
            const DimsRow& e = kExpectedDims[n - 1];
            bool ok = e.cc == c.critical && e.fsc == c.fsc && e.full == c.full;
            status = ok ? "match" : "MISMATCH";
            r.ok = r.ok && ok;
        }
        rows.push_back({{"n", n},
                        {"cc", c.critical},
                        {"fsc", c.fsc},
                        {"full", c.full},
                        {"cc_quotient", c.critical / q},
                        {"fsc_quotient", c.fsc / q},
                        {"full_quotient", c.full / q},
                        {"expected", status}});
        char line[160];
        std::snprintf(line, sizeof line, "%2d %9lu %9lu %9lu %8lu %8lu %8lu  %s\n", n, (unsigned long)c.critical,
                      (unsigned long)c.fsc, (unsigned long)c.full, (unsigned long)(c.critical / q),
                      (unsigned long)(c.fsc / q), (unsigned long)(c.full / q), status.c_str());
        text << line;
        csv << n << "," << c.critical << "," << c.fsc << "," << c.full << "," << c.critical / q << "," << c.fsc / q
            << "," << c.full / q << "\n";
    }
    r.json = {{"rows", rows}, {"ok", r.ok}};
    r.text = text.str();
    r.csv = csv.str();
    return r;
}

namespace {

uint64_t binom(unsigned a, unsigned b)
{
    uint64_t r = 1;
    for (unsigned k = 1; k <= b; ++k) r = r * (a - b + k) / k;
    return r;
}

json compute_betti(const RunConfig& cfg)
{
    const int n = cfg.n;
    const uint64_t p = cfg.prime();
    FieldPtr F = Field::create(p, cfg.ext ? cfg.ext : 1);
    EpsMode eps = parse_eps(cfg, *F);
    if (eps.bundle) throw std::invalid_argument("betti needs a fiber; use pages or monodromy for the bundle");

    // Basis index plus, for forced dense elimination, the largest degree block.
    uint64_t count = uint64_t(1) << (n * n);
    if (cfg.lie == "ravenel" && cfg.complex != "full") {
        LabelCounts lc = label_counts(n, p);
        count = cfg.complex == "cc" ? lc.critical : lc.fsc;
    }
    uint64_t est = count * 96;
    if (cfg.method == "dense") {
        uint64_t mid = std::min<uint64_t>(binom(n * n, n * n / 2), count);
        est += mid * mid * sizeof(Elt);
    }
    if (est > cfg.mem_cap_mb * 1024 * 1024)
        throw std::runtime_error("estimated memory " + std::to_string(est >> 20) + " MB exceeds the cap of " +
                                 std::to_string(cfg.mem_cap_mb) +
                                 " MB; restrict to --complex cc, use --method sparse, or raise --mem-cap-mb");

    Complex base = cfg.lie == "gl" ? build_gl(n, F, p) : build_deformed(n, p, F, eps);
    BettiTable bt;
    if (cfg.complex == "full") bt = betti(base, parse_method(cfg.method));
    else bt = betti(subcomplex(base, parse_label(cfg.complex)), parse_method(cfg.method));
    json j = bt.to_json();
    j["csv"] = bt.to_csv();
    return j;
}

} // namespace

CommandResult cmd_betti(const RunConfig& cfg)
{
    CommandResult r;
    json j;
    std::optional<ResultCache> cache;
    if (!cfg.no_cache) cache.emplace(default_cache_root(cfg));
    if (cache)
        if (auto hit = cache->load(cfg)) j = *hit;
    if (j.is_null()) {
        j = compute_betti(cfg);
        if (cache) cache->store(cfg, j);
    }
    r.csv = j.at("csv").get<std::string>();
    j.erase("csv");
    std::ostringstream t;
    t << "complex " << cfg.complex << " of " << (cfg.lie == "gl" ? "gl" : "L") << "(" << cfg.n << ") over F_" << cfg.prime();
    if (cfg.ext > 1) t << "^" << cfg.ext;
    if (cfg.lie == "ravenel") t << ", eps = " << cfg.epsilon;
    t << "\n  totals:";
    for (auto& v : j.at("totals")) t << " " << v.get<uint64_t>();
    t << "\n  total: " << j.at("total").get<uint64_t>() << "\n";
    r.text = t.str();
    r.json = j;
    return r;
}

CommandResult cmd_verify(const RunConfig& cfg)
{
    CommandResult r;
    std::vector<Check> checks = run_suite(cfg.suite, cfg);
    json cs = json::array();
    std::ostringstream t;
    t << "suite " << cfg.suite << " (n = " << cfg.n << ", p = " << cfg.prime() << ")\n";
    for (auto& c : checks) {
        r.ok = r.ok && c.pass;
        cs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        t << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name;
        if (!c.detail.empty()) t << ": " << c.detail;
        t << "\n";
    }
    t << (r.ok ? "PASS" : "FAIL") << "\n";
    r.json = {{"suite", cfg.suite}, {"n", cfg.n}, {"p", cfg.prime()}, {"checks", cs}, {"pass", r.ok}};
    r.text = t.str();
    return r;
}

CommandResult cmd_presentations(const RunConfig& cfg)
{
    if (cfg.n > 3) throw std::invalid_argument("presentations are available for n <= 3");
    CommandResult r;
    json fx = read_json((fs::path(data_dir(cfg)) / "fixtures" / "presentations.json").string());
    json heights = json::array();
    for (auto& h : fx.at("heights")) {
        if (h.at("n").get<int>() != cfg.n) continue;
        PresentationReport rep = check_presentation(h);
        r.ok = r.ok && rep.ok();
        heights.push_back(rep.to_json());
        r.text += rep.to_text();
    }
    if (heights.empty()) throw std::invalid_argument("no presentation fixture for n = " + std::to_string(cfg.n));
    r.json = {{"heights", heights}, {"ok", r.ok}};
    return r;
}

namespace {

std::string page_text(const PageReport& rep)
{
    std::ostringstream t;
    t << rep.name << ": pages 0.." << rep.r_max << (rep.converged ? " (converged)" : "") << "\n";
    for (int r = 0; r <= rep.r_max; ++r) {
        uint64_t tot = rep.total(r);
        if (r > 1 && tot == rep.total(r - 1) && r > rep.collapse_page) continue;
        t << "  E_" << r << " total " << tot << "\n";
    }
    t << "  collapse page: " << (rep.collapse_page ? std::to_string(rep.collapse_page) : "not reached") << "\n";
    t << "  nonzero d_r (r >= 1): " << rep.nonzero_differentials.size() << "\n";
    size_t shown = 0;
    for (auto& s : rep.nonzero_differentials) {
        if (++shown > 12) {
            t << "    ...\n";
            break;
        }
        t << "    " << s << "\n";
    }
    return t.str();
}

std::string page_csv(const PageReport& rep)
{
    std::ostringstream c;
    c << "r,s,t,u,dim,rank_out\n";
    for (auto& e : rep.entries) c << e.r << "," << e.s << "," << e.t << "," << e.u << "," << e.dim << "," << e.rank_out << "\n";
    return c.str();
}

} // namespace

CommandResult cmd_pages(const RunConfig& cfg)
{
    if (cfg.lie != "gl") throw std::invalid_argument("the first-subscript filtration lives on CE(gl_n); pass --lie gl");
    if (cfg.complex == "fsc") throw std::invalid_argument("pages supports --complex full or cc");
    CommandResult r;
    const uint64_t p = cfg.prime();
    FieldPtr F = Field::create(p, cfg.ext ? cfg.ext : 1);
    Complex gl = build_gl(cfg.n, F, p);
    FilteredComplex fc = filter_first_subscript(gl);
    if (cfg.complex == "cc") fc = critical_block(fc);
    PageReport rep = run_pages(fc, cfg.r_max);
    r.json = rep.to_json();
    r.text = page_text(rep);
    r.csv = page_csv(rep);
    return r;
}

CommandResult cmd_monodromy(const RunConfig& cfg)
{
    CommandResult r;
    const uint64_t p = cfg.prime();
    FieldPtr F = Field::create(p, cfg.ext ? cfg.ext : 1);
    KummerConnection conn = connection_of(cfg);
    Lattice L = cfg.lattice == "core" ? core_build(conn, F) : medial_build(conn, F);
    Homogeneity hom = core_homogeneity(L);
    auto wit = [&](const LatticeWitness& w) {
        return json{{"source", format_mono(w.source, conn.n)}, {"target", format_mono(w.target, conn.n)}, {"shift", w.shift}};
    };
    json j;
    j["connection"] = conn.to_json();
    j["lattice"] = cfg.lattice;
    j["closed"] = !L.closure.has_value();
    j["closure_witness"] = L.closure ? wit(*L.closure) : json(nullptr);
    j["homogeneous"] = hom.holds;
    j["homogeneity_witness"] = hom.witness ? wit(*hom.witness) : json(nullptr);
    std::ostringstream t;
    t << cfg.lattice << " lattice, flavor " << to_string(conn.flavor) << ", n = " << conn.n << "\n";
    t << "  closed under d: " << (L.closure ? "no" : "yes");
    if (L.closure)
        t << " (d " << format_mono(L.closure->source, conn.n) << " has " << format_mono(L.closure->target, conn.n)
          << " at shift " << L.closure->shift << ")";
    t << "\n  homogeneous: " << (hom.holds ? "yes" : "no");
    if (hom.witness)
        t << " (d " << format_mono(hom.witness->source, conn.n) << " has " << format_mono(hom.witness->target, conn.n)
          << " at shift " << hom.witness->shift << ")";
    t << "\n";

    // gr^t bases for the lowest filtration degrees.
    json table = json::array();
    std::map<int64_t, std::vector<std::string>> rows;
    for (auto& [b, a] : L.a) {
        int64_t lo = L.lower_exponent(b);
        for (int64_t e = lo; e <= lo + 1; ++e) {
            int64_t tt = L.filtration(b, e);
            if (tt <= L.min_filtration() + 1) rows[tt].push_back(format_lattice_element(L, b, e));
        }
    }
    t << "  filtration table:\n";
    for (auto& [tt, els] : rows) {
        std::sort(els.begin(), els.end());
        table.push_back({{"t", tt}, {"elements", els}});
        t << "    t = " << tt << ":";
        const size_t shown = std::min<size_t>(els.size(), 8);
        for (size_t k = 0; k < shown; ++k) t << " " << els[k];
        if (shown < els.size()) t << " ... (" << els.size() << " elements, full list in JSON)";
        t << "\n";
    }
    j["filtration_table"] = table;

    if (!L.closure) {
        MonodromyReport mr = monodromy_ss(L, cfg.t_max);
        j["pages"] = mr.pages.to_json();
        j["collapses"] = mr.collapses;
        j["fiber_betti"] = mr.fiber_betti;
        j["e1_matches_fiber"] = mr.e1_matches_fiber;
        t << page_text(mr.pages);
        t << "  E_1 columns equal H*(fixed fiber at 1): " << (mr.e1_matches_fiber ? "yes" : "no") << "\n";
        r.csv = page_csv(mr.pages);
    } else {
        t << "  spectral sequence skipped: the lattice is not a subcomplex\n";
    }
    r.json = j;
    r.text = t.str();
    return r;
}

namespace {

void add_common(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--n", cfg.n, "height n");
    sub->add_option("--p", cfg.p, "prime (default: first prime above 2n^2)");
    sub->add_option("--ext", cfg.ext, "field extension degree");
    sub->add_option("--epsilon", cfg.epsilon, "fiber parameter, or x for the bundle");
    sub->add_option("--lie", cfg.lie, "ravenel or gl");
    sub->add_option("--complex", cfg.complex, "full, cc or fsc");
    sub->add_option("--format", cfg.format, "text, json or csv");
    sub->add_option("--threads", cfg.threads, "worker threads (0: all cores)");
    sub->add_option("--cache-dir", cfg.cache_dir, "result cache root");
    sub->add_option("--data-dir", cfg.data_dir, "fixture data directory");
    sub->add_flag("--no-cache", cfg.no_cache, "skip the result cache");
    sub->add_flag("--slow", cfg.slow, "include long-running extended checks");
    sub->add_option("--method", cfg.method, "rank method: auto, dense or sparse");
    sub->add_option("--mem-cap-mb", cfg.mem_cap_mb, "refuse runs estimated above this size");
}

void add_flavor(CLI::App* sub, std::vector<std::string>& flavor)
{
    sub->add_option("--flavor", flavor, "sigma, semilinear, or custom <file>")->expected(1, 2);
}

} // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"stabfold: deformed Chevalley-Eilenberg DGAs over finite fields"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    RunConfig cfg;
    std::vector<std::string> flavor;

    CLI::App* dims = app.add_subcommand("dims", "dimension table of cc, FSC and the full complex");
    add_common(dims, cfg);
    dims->add_option("--n-max", cfg.n_max, "largest n");
    CLI::App* betti_cmd = app.add_subcommand("betti", "Betti table of a complex");
    add_common(betti_cmd, cfg);
    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    add_common(verify, cfg);
    add_flavor(verify, flavor);
    verify->add_option("suite", cfg.suite, "suite name")->required();
    CLI::App* pres = app.add_subcommand("presentations", "check worked presentations against the engine");
    add_common(pres, cfg);
    CLI::App* pages = app.add_subcommand("pages", "first-subscript spectral sequence of CE(gl_n)");
    add_common(pages, cfg);
    pages->add_option("--r-max", cfg.r_max, "last page (default: until convergence)");
    CLI::App* mono = app.add_subcommand("monodromy", "core or medial lattice and its spectral sequence");
    add_common(mono, cfg);
    add_flavor(mono, flavor);
    mono->add_option("--lattice", cfg.lattice, "core or medial");
    mono->add_option("--t-max", cfg.t_max, "truncation level of the x-adic filtration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    for (CLI::App* s : app.get_subcommands()) cfg.command = s->get_name();
    if (!flavor.empty()) {
        cfg.flavor = flavor[0];
        if (flavor.size() > 1) cfg.flavor_file = flavor[1];
    }
    if (cfg.command == "pages" && cfg.lie == "ravenel") cfg.lie = "gl";
    if (cfg.command == "betti" && cfg.lie == "gl") cfg.epsilon = "1";

    try {
        cfg.validate();
        if (cfg.threads > 0) set_threads(cfg.threads);
        CommandResult r;
        if (cfg.command == "dims") r = cmd_dims(cfg);
        else if (cfg.command == "betti") r = cmd_betti(cfg);
        else if (cfg.command == "verify") r = cmd_verify(cfg);
        else if (cfg.command == "presentations") r = cmd_presentations(cfg);
        else if (cfg.command == "pages") r = cmd_pages(cfg);
        else r = cmd_monodromy(cfg);

        const std::string hash = cfg.hash();
        if (cfg.format == "json") {
            json j{{"provenance", {{"tool", "stabfold"}, {"version", kVersion}, {"config_hash", hash}, {"config", cfg.canonical()}}},
                   {"result", r.json}};
            out << j.dump(2) << "\n";
        } else if (cfg.format == "csv") {
            if (r.csv.empty()) throw std::invalid_argument("command " + cfg.command + " has no CSV form");
            err << "# stabfold " << kVersion << " config " << hash << "\n";
            out << r.csv;
        } else {
            out << "# stabfold " << kVersion << " config " << hash << "\n" << r.text;
        }
        return r.ok ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace stabfold
