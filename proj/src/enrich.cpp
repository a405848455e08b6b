#include "vulrg/enrich.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace vulrg {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string normalize_cpe_field(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        if (ch == ' ')
            out.push_back('_');
        else
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

std::string iso_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string stamp(const EnrichOptions& opts) {
    return opts.now_iso ? opts.now_iso() : iso_now();
}

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// One recorded (or live) GET. Fixture mode never constructs a client; live
// mode retries transient failures and mirrors successful responses into the
// fixture directory when one is configured.
json fetch_json(const std::string& base, const std::string& path, const std::string& query,
                const httplib::Headers& headers, const EnrichOptions& opts,
                std::string& fetched_at) {
    std::string key = query.empty() ? path : path + "?" + query;
    if (opts.source == FetchSource::Fixture) {
        if (opts.fixture_dir.empty())
            throw ConfigError("fixture mode needs a fixture directory for recorded responses");
        std::string file = opts.fixture_dir + "/" + fixture_file_name(path, query);
        std::ifstream in(file);
        if (!in)
            throw IoError("missing recorded response '" + file + "' for " + key);
        json wrapper;
        try {
            wrapper = json::parse(in);
        } catch (const json::parse_error& e) {
            throw IoError("unparseable recorded response '" + file + "': " + e.what());
        }
        if (!wrapper.is_object() || !wrapper.contains("status") || !wrapper.contains("body"))
            throw IoError("recorded response '" + file + "' lacks status/body fields");
        int status = wrapper["status"].get<int>();
        if (status != 200)
            throw IoError("recorded response '" + file + "' has status " +
                          std::to_string(status));
        fetched_at = wrapper.value("fetched_at", "");
        return wrapper["body"];
    }

    httplib::Client client(base);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(30, 0);
    std::string target = key;
    std::string body;
    int status = 0;
    int attempts = opts.max_retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            int wait = opts.retry_base_ms << (attempt - 1);
            std::this_thread::sleep_for(std::chrono::milliseconds(wait));
        }
        auto res = client.Get(target, headers);
        if (!res) {
            status = 0;
            continue;  // connection failure, retry
        }
        status = res->status;
        if (status == 429 || status >= 500) continue;
        body = res->body;
        break;
    }
    if (status != 200) {
        std::string what = status == 0 ? "connection failed" : "status " + std::to_string(status);
        throw IoError("request " + base + target + " failed after " + std::to_string(attempts) +
                      " attempt(s): " + what);
    }
    json parsed;
    try {
        parsed = json::parse(body);
    } catch (const json::parse_error& e) {
        throw IoError("unparseable response from " + base + target + ": " + e.what());
    }
    fetched_at = stamp(opts);
    if (!opts.fixture_dir.empty()) {
        ordered_json wrapper;
        wrapper["fetched_at"] = fetched_at;
        wrapper["status"] = 200;
        wrapper["url"] = base + target;
        wrapper["body"] = parsed;
        std::string file = opts.fixture_dir + "/" + fixture_file_name(path, query);
        std::ofstream out(file);
        if (!out)
            throw IoError("cannot write recorded response '" + file + "'");
        out << wrapper.dump(2) << "\n";
    }
    return parsed;
}

AttackVector attack_vector_from_nvd(const std::string& s) {
    if (s == "NETWORK") return AttackVector::Network;
    if (s == "ADJACENT_NETWORK") return AttackVector::Adjacent;
    if (s == "LOCAL") return AttackVector::Local;
    if (s == "PHYSICAL") return AttackVector::Physical;
    throw IoError("unknown attack vector '" + s + "' in NVD response");
}

}  // namespace

std::string CpeId::canonical() const {
    return std::string("cpe:2.3:") + part + ":" + normalize_cpe_field(vendor) + ":" +
           normalize_cpe_field(product) + ":" + normalize_cpe_field(version);
}

CpeId generate_cpe(const ComponentNode& c) {
    if (c.cpe) {
        // Explicit identifier wins; pull the typed fields back out of it.
        std::vector<std::string> parts;
        std::stringstream ss(*c.cpe);
        std::string piece;
        while (std::getline(ss, piece, ':')) parts.push_back(piece);
        if (parts.size() < 6 || parts[0] != "cpe" || parts[1] != "2.3" || parts[2].size() != 1)
            throw ValidationError("component '" + c.id + "': unparseable cpe '" + *c.cpe + "'");
        CpeId id;
        id.part = parts[2][0];
        id.vendor = normalize_cpe_field(parts[3]);
        id.product = normalize_cpe_field(parts[4]);
        id.version = normalize_cpe_field(parts[5]);
        return id;
    }
    if (c.vendor.empty())
        throw ValidationError("component '" + c.id + "': missing vendor for CPE generation");
    if (c.product.empty())
        throw ValidationError("component '" + c.id + "': missing product for CPE generation");
    if (c.version.empty())
        throw ValidationError("component '" + c.id + "': missing version for CPE generation");
    CpeId id;
    id.part = c.part == Part::Os ? 'o' : c.part == Part::Hardware ? 'h' : 'a';
    id.vendor = normalize_cpe_field(c.vendor);
    id.product = normalize_cpe_field(c.product);
    id.version = normalize_cpe_field(c.version);
    return id;
}

std::string fixture_file_name(const std::string& path, const std::string& query) {
    std::string key = query.empty() ? path : path + "?" + query;
    std::string stem = path;
    while (!stem.empty() && stem.front() == '/') stem.erase(stem.begin());
    for (char& ch : stem) {
        bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                  (ch >= '0' && ch <= '9') || ch == '.' || ch == '-';
        if (!ok) ch = '_';
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(key)));
    return stem + "__" + hex + ".json";
}

FetchResult fetch_vulnerabilities(const CpeId& cpe, const EnrichOptions& opts) {
    if (opts.source == FetchSource::Live && opts.api_key.empty())
        throw ConfigError("live NVD enrichment needs an API key (set VULRG_NVD_API_KEY)");
    httplib::Headers headers;
    if (opts.source == FetchSource::Live) headers.emplace("apiKey", opts.api_key);
    std::string fetched_at;
    json body = fetch_json(opts.nvd_base, "/rest/json/cves/2.0", "cpeName=" + cpe.canonical(),
                           headers, opts, fetched_at);

    FetchResult out;
    const json& vulns = body.value("vulnerabilities", json::array());
    for (const auto& item : vulns) {
        if (!item.contains("cve")) continue;
        const json& cve = item["cve"];
        std::string id = cve.value("id", "");
        if (id.empty()) continue;
        const json* metric = nullptr;
        if (cve.contains("metrics")) {
            const json& metrics = cve["metrics"];
            for (const char* key : {"cvssMetricV31", "cvssMetricV30"}) {
                if (metrics.contains(key) && metrics[key].is_array() && !metrics[key].empty()) {
                    metric = &metrics[key][0];
                    break;
                }
            }
        }
        if (!metric || !metric->contains("cvssData")) {
            out.warnings.push_back("skipping " + id + ": no CVSS v3 metrics in NVD record");
            continue;
        }
        const json& data = (*metric)["cvssData"];
        FetchedVulnerability fv;
        fv.fetched_at = fetched_at;
        fv.record.cve_id = id;
        fv.record.cvss_base = data.value("baseScore", 0.0);
        fv.record.likelihood_subscore = metric->value("exploitabilityScore", 0.0);
        fv.record.impact_subscore = metric->value("impactScore", 0.0);
        fv.record.scope_change = data.value("scope", "UNCHANGED") == "CHANGED";
        fv.record.attack_vector = attack_vector_from_nvd(data.value("attackVector", "NETWORK"));
        out.items.push_back(std::move(fv));
    }
    int total = body.value("totalResults", static_cast<int>(out.items.size()));
    if (total > static_cast<int>(vulns.size()))
        out.warnings.push_back("NVD response for " + cpe.canonical() + " is truncated (" +
                               std::to_string(vulns.size()) + " of " + std::to_string(total) +
                               " results)");
    std::sort(out.items.begin(), out.items.end(),
              [](const FetchedVulnerability& a, const FetchedVulnerability& b) {
                  return a.record.cve_id < b.record.cve_id;
              });
    return out;
}

EpssResult fetch_epss(const std::vector<std::string>& cve_ids, const EnrichOptions& opts) {
    EpssResult out;
    std::vector<std::string> ids(cve_ids);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty()) return out;

    for (size_t start = 0; start < ids.size(); start += 100) {
        size_t end = std::min(start + 100, ids.size());
        std::string joined;
        for (size_t i = start; i < end; ++i) {
            if (i > start) joined += ",";
            joined += ids[i];
        }
        std::string fetched_at;
        json body = fetch_json(opts.epss_base, "/data/v1/epss", "cve=" + joined, {}, opts,
                               fetched_at);
        out.fetched_at = fetched_at;
        for (const auto& row : body.value("data", json::array())) {
            std::string id = row.value("cve", "");
            if (id.empty() || !row.contains("epss")) continue;
            double score = row["epss"].is_string() ? std::stod(row["epss"].get<std::string>())
                                                   : row["epss"].get<double>();
            if (score < 0.0 || score > 1.0)
                throw IoError("EPSS score for " + id + " outside [0,1]: " + std::to_string(score));
            out.scores[id] = score;
        }
    }
    for (const auto& id : ids)
        if (!out.scores.count(id)) out.misses.push_back(id);
    return out;
}

void annotate_threat_flags(std::vector<FetchedVulnerability>& records,
                           const std::string& flags_path,
                           std::vector<std::string>& warnings) {
    std::ifstream in(flags_path);
    if (!in)
        throw IoError("cannot read flags file '" + flags_path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("malformed flags file '" + flags_path + "': empty");
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
            s.pop_back();
        size_t i = 0;
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        return s.substr(i);
    };
    if (strip(line) != "cve_id,exploit_exists,ransomware")
        throw ValidationError("malformed flags file '" + flags_path +
                              "': first line must be 'cve_id,exploit_exists,ransomware'");
    auto parse_bool = [&](const std::string& s, int lineno) {
        std::string t = strip(s);
        std::transform(t.begin(), t.end(), t.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (t == "1" || t == "true") return true;
        if (t == "0" || t == "false") return false;
        throw ValidationError("malformed flags file '" + flags_path + "' line " +
                              std::to_string(lineno) + ": bad boolean '" + s + "'");
    };
    std::map<std::string, std::pair<bool, bool>> flags;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = strip(line);
        if (t.empty()) continue;
        size_t c1 = t.find(',');
        size_t c2 = c1 == std::string::npos ? std::string::npos : t.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw ValidationError("malformed flags file '" + flags_path + "' line " +
                                  std::to_string(lineno) + ": expected 3 columns");
        std::string id = strip(t.substr(0, c1));
        flags[id] = {parse_bool(t.substr(c1 + 1, c2 - c1 - 1), lineno),
                     parse_bool(t.substr(c2 + 1), lineno)};
    }

    std::set<std::string> used;
    std::vector<std::string> unflagged;
    for (auto& fv : records) {
        auto it = flags.find(fv.record.cve_id);
        if (it == flags.end()) {
            fv.record.exploit_exists = false;
            fv.record.ransomware = false;
            if (std::find(unflagged.begin(), unflagged.end(), fv.record.cve_id) ==
                unflagged.end())
                unflagged.push_back(fv.record.cve_id);
            continue;
        }
        used.insert(it->first);
        fv.record.exploit_exists = it->second.first;
        fv.record.ransomware = it->second.second;
    }
    std::sort(unflagged.begin(), unflagged.end());
    if (!unflagged.empty()) {
        std::string list;
        for (const auto& id : unflagged) list += (list.empty() ? "" : ", ") + id;
        warnings.push_back("no threat flags for: " + list + " (defaulting to false)");
    }
    for (const auto& [id, f] : flags)
        if (!used.count(id))
            warnings.push_back("flags for unknown CVE '" + id + "' ignored");
}

EnrichOutcome enrich_inventory(const std::string& inventory_path, const std::string& flags_path,
                               const EnrichOptions& opts) {
    SystemModel model = load_system_model(inventory_path);
    EnrichOutcome out;

    struct Slice {
        size_t asset_idx;
        size_t start;
        size_t count;
    };
    std::vector<FetchedVulnerability> flat;
    std::vector<Slice> slices;
    std::vector<std::vector<std::string>> cpes(model.assets.size());

    for (size_t ai = 0; ai < model.assets.size(); ++ai) {
        const Asset& a = model.assets[ai];
        Slice slice{ai, flat.size(), 0};
        std::map<std::string, std::string> first_owner;  // cve -> component
        for (const auto& c : a.components) {
            CpeId cpe = generate_cpe(c);
            cpes[ai].push_back(cpe.canonical());
            FetchResult fr = fetch_vulnerabilities(cpe, opts);
            for (auto& w : fr.warnings) out.warnings.push_back(std::move(w));
            for (auto& fv : fr.items) {
                auto it = first_owner.find(fv.record.cve_id);
                if (it != first_owner.end()) {
                    out.warnings.push_back(fv.record.cve_id + " affects both '" + it->second +
                                           "' and '" + c.id + "' in asset '" + a.id +
                                           "'; keeping '" + it->second + "'");
                    continue;
                }
                first_owner[fv.record.cve_id] = c.id;
                fv.record.component_ref = c.id;
                flat.push_back(std::move(fv));
                slice.count += 1;
            }
        }
        // Stable per-asset order: by CVE id regardless of component order.
        std::sort(flat.begin() + slice.start, flat.end(),
                  [](const FetchedVulnerability& x, const FetchedVulnerability& y) {
                      return x.record.cve_id < y.record.cve_id;
                  });
        slices.push_back(slice);
    }

    std::vector<std::string> all_ids;
    for (const auto& fv : flat) all_ids.push_back(fv.record.cve_id);
    EpssResult epss = fetch_epss(all_ids, opts);
    if (!epss.misses.empty()) {
        std::string list;
        for (const auto& id : epss.misses) list += (list.empty() ? "" : ", ") + id;
        out.warnings.push_back("no EPSS score for: " + list + " (defaulting to 0)");
    }
    for (auto& fv : flat) {
        auto it = epss.scores.find(fv.record.cve_id);
        fv.record.epss = it == epss.scores.end() ? 0.0 : it->second;
    }

    if (flags_path.empty()) {
        if (!flat.empty())
            out.warnings.push_back(
                "no flags file given; exploit and ransomware flags default to false");
    } else {
        annotate_threat_flags(flat, flags_path, out.warnings);
    }

    ordered_json doc = serialize(model);
    const char* source = opts.source == FetchSource::Live ? "live" : "fixture";
    for (const Slice& s : slices) {
        ordered_json& aj = doc["assets"][s.asset_idx];
        for (size_t ci = 0; ci < cpes[s.asset_idx].size(); ++ci)
            aj["components"][ci]["cpe"] = cpes[s.asset_idx][ci];
        ordered_json arr = ordered_json::array();
        for (size_t i = s.start; i < s.start + s.count; ++i) {
            const FetchedVulnerability& fv = flat[i];
            const VulnerabilityRecord& v = fv.record;
            ordered_json vj;
            vj["cve_id"] = v.cve_id;
            vj["component_ref"] = v.component_ref;
            vj["cvss_base"] = v.cvss_base;
            vj["likelihood_subscore"] = v.likelihood_subscore;
            vj["impact_subscore"] = v.impact_subscore;
            vj["epss"] = v.epss;
            vj["exploit_exists"] = v.exploit_exists;
            vj["scope_change"] = v.scope_change;
            vj["ransomware"] = v.ransomware;
            vj["attack_vector"] = to_string(v.attack_vector);
            vj["enrichment"] = {{"source", source}, {"fetched_at", fv.fetched_at}};
            arr.push_back(std::move(vj));
        }
        aj["vulnerabilities"] = std::move(arr);
    }
    out.document = std::move(doc);
    return out;
}

}  // namespace vulrg
