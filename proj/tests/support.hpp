#pragma once

// Shared plumbing for the test binaries: fixture paths, golden loading,
// tolerant comparisons, rank-order helpers and CLI capture.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "vulrg/cli.hpp"
#include "vulrg/rank.hpp"

namespace support {

inline std::string fixture(const std::string& name) {
    return std::string(VULRG_FIXTURE_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
    std::string file = name;
    if (file.find(".json") == std::string::npos) file += ".json";
    return std::string(VULRG_GOLDEN_DIR) + "/" + file;
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("test support: cannot read " + path);
    return nlohmann::json::parse(in);
}

inline nlohmann::json golden(const std::string& name) { return load_json(golden_path(name)); }

inline bool close(double a, double b, double tol = 1e-6) { return std::abs(a - b) <= tol; }

inline bool rel_close(double a, double b, double tol = 1e-6) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Kendall tau-a over the reference ordering: every unordered pair of
// reference keys is concordant when the candidate ranks them the same way.
inline std::pair<double, int> kendall_tau(const std::vector<std::string>& mine,
                                          const std::vector<std::string>& ref) {
    std::map<std::string, int> mpos, rpos;
    for (size_t i = 0; i < mine.size(); ++i) mpos[mine[i]] = static_cast<int>(i);
    for (size_t i = 0; i < ref.size(); ++i) rpos[ref[i]] = static_cast<int>(i);
    std::vector<std::string> common;
    for (const auto& k : ref)
        if (mpos.count(k)) common.push_back(k);
    int n = static_cast<int>(common.size());
    int concordant = 0, discordant = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            int s1 = rpos[common[i]] - rpos[common[j]];
            int s2 = mpos[common[i]] - mpos[common[j]];
            if (s1 * s2 > 0)
                ++concordant;
            else
                ++discordant;
        }
    }
    double tau = n < 2 ? 1.0 : static_cast<double>(concordant - discordant) / (n * (n - 1) / 2);
    return {tau, discordant};
}

inline std::vector<std::string> order_keys(const vulrg::PatchRanking& r) {
    std::vector<std::string> keys;
    for (const auto& e : r.entries) keys.push_back(e.cve_id + "@" + e.asset_id);
    return keys;
}

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

// In-process invocation; covers everything except actual binary wiring.
inline CliRun run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = vulrg::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Runs the real executable; used for byte-identity and exit-code checks.
inline CliRun run_cli_bin(const std::string& argline) {
    static int counter = 0;
    std::string stem = "/tmp/vulrg_test_" + std::to_string(getpid()) + "_" +
                       std::to_string(counter++);
    std::string out_f = stem + ".out", err_f = stem + ".err";
    std::string cmd = std::string(VULRG_CLI_BIN) + " " + argline + " >" + out_f + " 2>" + err_f;
    int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    r.out = slurp(out_f);
    r.err = slurp(err_f);
    std::remove(out_f.c_str());
    std::remove(err_f.c_str());
    return r;
}

inline std::string slurp_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace support
