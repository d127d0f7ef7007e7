#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace stabfold {

constexpr const char* kVersion = "0.1.0";
constexpr int kCacheSchema = 1;

struct RunConfig {
    std::string command;
    std::string suite;          // verify only
    int n = 2;
    int n_max = 5;              // dims only
    uint64_t p = 0;             // 0: first prime above 2n^2
    unsigned ext = 0;           // 0: command default
    std::string epsilon = "0";  // integer, or "x" for the bundle
    std::string lie = "ravenel";
    std::string complex = "full";
    std::string flavor = "sigma";
    std::string flavor_file;    // flavor custom
    std::string lattice = "core";
    int r_max = -1;
    int t_max = 6;
    std::string method = "auto";
    std::string format = "text";
    std::string cache_dir;
    std::string data_dir;
    bool no_cache = false;
    bool slow = false;
    int threads = 0;
    uint64_t mem_cap_mb = 4096;

    uint64_t prime() const;
    // Validates ranges and choices; throws std::invalid_argument.
    void validate() const;
    // Fields that determine the result, in a fixed key order.
    nlohmann::json canonical() const;
    std::string hash() const;
};

std::string sha256_hex(const std::string& data);

// Content-addressed JSON results under a cache root.
class ResultCache {
public:
    explicit ResultCache(std::string root);
    std::optional<nlohmann::json> load(const RunConfig& cfg) const;
    void store(const RunConfig& cfg, const nlohmann::json& result) const;
    std::string path_for(const RunConfig& cfg) const;

private:
    std::string root_;
};
// --cache-dir, else $STABFOLD_CACHE, else ./.stabfold-cache
std::string default_cache_root(const RunConfig& cfg);

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CommandResult {
    nlohmann::json json;
    std::string text;
    std::string csv;
    bool ok = true;
};

CommandResult cmd_dims(const RunConfig& cfg);
CommandResult cmd_betti(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_presentations(const RunConfig& cfg);
CommandResult cmd_pages(const RunConfig& cfg);
CommandResult cmd_monodromy(const RunConfig& cfg);

const std::vector<std::string>& verify_suites();
// Throws std::invalid_argument for an unknown suite.
std::vector<Check> run_suite(const std::string& suite, const RunConfig& cfg);

// Parses arguments, runs, prints; returns the process exit code.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace stabfold
