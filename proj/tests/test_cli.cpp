#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "stabfold/cli.hpp"

using namespace stabfold;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "stabfold");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string tmpdir(const std::string& tag)
{
    fs::path p = fs::temp_directory_path() / ("stabfold-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

} // namespace

TEST_CASE("config hashing is stable and sensitive")
{
    RunConfig a;
    a.command = "betti";
    a.n = 2;
    RunConfig b = a;
    CHECK(a.hash() == b.hash());
    b.p = 13;
    CHECK(a.hash() != b.hash());
    CHECK(a.prime() == 11);
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("betti: cache round trip is byte-identical")
{
    std::string dir = tmpdir("cache");
    Run first = run({"betti", "--n", "3", "--p", "19", "--format", "json", "--cache-dir", dir});
    REQUIRE(first.code == 0);
    size_t files = 0;
    for (auto& e : fs::recursive_directory_iterator(dir)) files += e.is_regular_file();
    CHECK(files == 1);
    Run second = run({"betti", "--n", "3", "--p", "19", "--format", "json", "--cache-dir", dir});
    CHECK(second.out == first.out);
    Run fresh = run({"betti", "--n", "3", "--p", "19", "--format", "json", "--no-cache", "--cache-dir", dir});
    CHECK(fresh.out == first.out);
    auto j = nlohmann::json::parse(first.out);
    CHECK(j.at("result").at("total") == 152);
    CHECK(j.at("provenance").at("version") == kVersion);
    Run csv = run({"betti", "--n", "2", "--format", "csv", "--cache-dir", dir});
    CHECK(csv.out.rfind("s,", 0) == 0);
    CHECK(csv.err.find("# stabfold") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("commands are deterministic")
{
    for (auto args : std::vector<std::vector<std::string>>{{"dims", "--n-max", "3", "--format", "json"},
                                                          {"pages", "--n", "2", "--format", "json", "--no-cache"},
                                                          {"presentations", "--n", "2", "--format", "json"},
                                                          {"monodromy", "--n", "2", "--format", "json"}}) {
        Run a = run(args), b = run(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK_NOTHROW((void)nlohmann::json::parse(a.out));
    }
}

TEST_CASE("usage errors and failing checks have distinct exit codes")
{
    CHECK(run({"betti", "--n", "0"}).code == 2);
    CHECK(run({"betti", "--n", "2", "--p", "12"}).code == 2);
    CHECK(run({"verify", "no-such-suite"}).code == 2);
    CHECK(run({"betti", "--n", "2", "--complex", "bogus"}).code == 2);
    CHECK(run({"betti", "--n", "2", "--epsilon", "x"}).code == 2);
    CHECK(run({"verify", "tables"}).code == 0);
    Run big = run({"betti", "--n", "5", "--mem-cap-mb", "1", "--no-cache"});
    CHECK(big.code == 2);
    CHECK(big.err.find("cap") != std::string::npos);
}

TEST_CASE("verify reports are machine readable")
{
    Run r = run({"verify", "collapse", "--n", "2", "--format", "json"});
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out).at("result");
    CHECK(j.at("pass") == true);
    CHECK(!j.at("checks").empty());
    for (auto& c : j.at("checks")) {
        CHECK(c.contains("name"));
        CHECK(c.contains("pass"));
    }
}
