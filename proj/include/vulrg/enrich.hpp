#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulrg/model.hpp"

namespace vulrg {

struct CpeId {
    char part = 'a';  // a = application, o = os, h = hardware
    std::string vendor;
    std::string product;
    std::string version;

    // cpe:2.3:<part>:<vendor>:<product>:<version>, lowercased, spaces as
    // underscores, trailing wildcard positions omitted.
    std::string canonical() const;
};

// Derives the CPE 2.3 identifier from component metadata; an explicit cpe
// field on the component wins. Missing vendor/product/version throws a
// ValidationError naming the field.
CpeId generate_cpe(const ComponentNode& c);

enum class FetchSource { Live, Fixture };

struct EnrichOptions {
    FetchSource source = FetchSource::Fixture;
    std::string fixture_dir;  // recorded responses; also the live-mode cache target
    std::string nvd_base = "https://services.nvd.nist.gov";
    std::string epss_base = "https://api.first.org";
    std::string api_key;      // required for live NVD queries
    int max_retries = 3;
    int retry_base_ms = 1000;
    // Injectable clock so recorded responses carry reproducible timestamps.
    std::function<std::string()> now_iso;
};

struct FetchedVulnerability {
    VulnerabilityRecord record;
    std::string fetched_at;
};

struct FetchResult {
    std::vector<FetchedVulnerability> items;  // sorted by cve id
    std::vector<std::string> warnings;
};

struct EpssResult {
    std::map<std::string, double> scores;
    std::vector<std::string> misses;  // requested ids with no published score
    std::string fetched_at;
};

// Query key and on-disk name for one recorded response; the name is the
// sanitized endpoint path plus a 64-bit FNV-1a hash of the full key.
std::string fixture_file_name(const std::string& path, const std::string& query);

// CVE records affecting one CPE, from the NVD 2.0 API or its recorded
// response. EPSS and the threat flags are filled by the later stages;
// records lacking CVSS v3 metrics are skipped with a warning.
FetchResult fetch_vulnerabilities(const CpeId& cpe, const EnrichOptions& opts);

// EPSS scores for a set of CVE ids (chunked queries, deterministic order).
EpssResult fetch_epss(const std::vector<std::string>& cve_ids, const EnrichOptions& opts);

// Merges exploit/ransomware flags from a CSV file (cve_id,exploit_exists,
// ransomware). CVEs without a row keep false flags and are listed in the
// warnings; rows for unknown CVEs are ignored with a warning.
void annotate_threat_flags(std::vector<FetchedVulnerability>& records,
                           const std::string& flags_path,
                           std::vector<std::string>& warnings);

struct EnrichOutcome {
    nlohmann::ordered_json document;  // inventory schema with vulnerabilities filled
    std::vector<std::string> warnings;
};

// Rebuilds every component's vulnerability list from the fetch pipeline:
// CPE generation, NVD query, EPSS merge, threat flags. The input document is
// untouched; running the result through enrichment again is a no-op.
EnrichOutcome enrich_inventory(const std::string& inventory_path, const std::string& flags_path,
                               const EnrichOptions& opts);

}  // namespace vulrg
