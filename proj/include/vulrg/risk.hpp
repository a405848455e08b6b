#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulrg/graph.hpp"
#include "vulrg/model.hpp"

namespace vulrg {

enum class RiskClass { HostBased, NetworkBased };

struct VulnRiskBreakdown {
    std::string cve_id;
    std::string component_id;
    std::string asset_id;
    double exploit_likelihood = 0.0;
    double propagation_likelihood = 0.0;
    double direct = 0.0;
    double indirect = 0.0;
    double total = 0.0;
    std::vector<std::string> explanation;

    std::string key() const { return cve_id + "@" + asset_id; }
};

struct AttackPath {
    std::string source;
    std::string target;
    std::vector<std::string> nodes;
    double total_weight = 0.0;
};

struct ComponentReport {
    std::string id;
    std::string asset_id;
    double cvs = 0.0;
    double local_centrality = 0.0;   // within the asset's own dependence graph
    double system_centrality = 0.0;  // within the system-wide graph
    double risk = 0.0;               // cvs * local_centrality
};

struct AssetReport {
    std::string id;
    double risk = 0.0;        // sum of its vulnerability totals
    double centrality = 0.0;  // mean system-wide component centrality
    AssetCriticality criticality;
    int path_count = 0;  // retained attack paths crossing this asset
};

struct PhaseTimings {
    double graph_ms = 0.0;  // graph builds, centralities, propagation weights
    double vuln_ms = 0.0;   // per-vulnerability scoring and asset sums
    double path_ms = 0.0;   // criticality filter, Dijkstra, network scoring
    double total_ms = 0.0;
};

struct RiskReport {
    std::vector<VulnRiskBreakdown> vulnerabilities;  // asset order, then component, then record order
    std::vector<ComponentReport> components;
    std::vector<AssetReport> assets;
    std::map<std::string, double> host_risk;
    std::vector<std::string> critical_assets;  // ids above the criticality threshold, sorted
    std::vector<AttackPath> paths;             // entry-to-critical, entries outermost
    double host_total = 0.0;
    double network = 0.0;
    double system = 0.0;
    std::vector<std::string> notices;
    PhaseTimings timings;

    const VulnRiskBreakdown* find(const std::string& key) const;
    const AssetReport* asset(const std::string& id) const;
    const ComponentReport* component(const std::string& id) const;
};

// ---- scalar scores ----

// EL = alpha * (likelihood/10) + beta * epss + gamma_exploit * [exploit].
double exploit_likelihood(const VulnerabilityRecord& v, const RiskParams& p);

// PL = delta * [scope change] + theta * [ransomware history].
double propagation_likelihood(const VulnerabilityRecord& v, const RiskParams& p);

// EL * impact * component centrality.
double direct_risk(const VulnerabilityRecord& v, double component_centrality, const RiskParams& p);

// Severity-weighted sum of one component's CVSS base scores over the rating
// buckets (Critical >= 9.0, High >= 7.0, Medium >= 4.0, else Low), divided
// by the sum of all four bucket weights.
double cvs(const Asset& asset, const std::string& component_id, const RiskParams& p);

// cvs * normalized centrality on the asset's own dependence graph.
double component_risk(const SystemModel& model, const Asset& asset,
                      const std::string& component_id, const RiskParams& p);

// Network or Adjacent attack vectors are network-based; Local and Physical
// are host-based.
RiskClass classify_vulnerability(const VulnerabilityRecord& v);

// Sum over breadth-first dependents of the source component (reversed
// depends-on edges, first reach wins) of the cumulative edge weight to each.
// This is the W factor of the indirect risk; zero when nothing depends on
// the component inside g.
double propagation_weight(const DependenceGraph& g, const std::string& component_id);

// PL * W * impact, gated to zero when PL < sigma or W = 0. Throws if the
// component is not in g.
double indirect_risk(const VulnerabilityRecord& v, const std::string& component_id,
                     const DependenceGraph& g, const RiskParams& p);

// Full per-vulnerability breakdown. Direct risk uses the asset-local
// centrality of the owning component; indirect propagation runs over g
// (callers pass the host-internal graph for asset aggregation).
VulnRiskBreakdown vulnerability_risk(const VulnerabilityRecord& v, const Asset& asset,
                                     const SystemModel& model, const DependenceGraph& g,
                                     const RiskParams& p);

// ---- aggregates (conveniences that evaluate just enough of the model) ----

double asset_risk(const SystemModel& model, const std::string& asset_id, const RiskParams& p);
double host_risk(const SystemModel& model, const std::string& host_id, const RiskParams& p);

// One shortest path per (entry point, critical asset) pair over the
// communication graph; minimal total weight, ties broken by lexicographic
// node sequence. Unreachable targets are skipped (the pipeline records a
// notice). Throws ValidationError when no asset clears the criticality
// threshold.
std::vector<AttackPath> shortest_attack_paths(const SystemModel& model, const RiskParams& p);

// Sum over path-asset occurrences of EL * impact * system-wide centrality
// for network-classified vulnerabilities. An asset on k retained paths
// counts k times unless dedup_paths collapses it to one.
double network_risk(const std::vector<AttackPath>& paths, const SystemModel& model,
                    const RiskParams& p);

// The whole pipeline: per-vulnerability scores with host-internal
// propagation, asset/host sums weighted by criticality, attack paths,
// network risk, and system = network + sum of hosts. Runs the decomposition
// self-audit before returning.
RiskReport system_risk(const SystemModel& model, const RiskParams& p);

// Recomputes every reported total from its parts; returns the list of
// mismatches (empty when the report is internally consistent).
std::vector<std::string> audit_report(const RiskReport& report, const SystemModel& model,
                                      const RiskParams& p);

// Stable JSON rendering of a report (schema "vulrg-report/1").
nlohmann::ordered_json report_to_json(const RiskReport& report, const SystemModel& model,
                                      const RiskParams& p);

}  // namespace vulrg
