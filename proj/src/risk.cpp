#include "vulrg/risk.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace vulrg {

using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const VulnRiskBreakdown* RiskReport::find(const std::string& key) const {
    for (const auto& v : vulnerabilities)
        if (v.key() == key) return &v;
    return nullptr;
}

const AssetReport* RiskReport::asset(const std::string& id) const {
    for (const auto& a : assets)
        if (a.id == id) return &a;
    return nullptr;
}

const ComponentReport* RiskReport::component(const std::string& id) const {
    for (const auto& c : components)
        if (c.id == id) return &c;
    return nullptr;
}

double exploit_likelihood(const VulnerabilityRecord& v, const RiskParams& p) {
    return p.alpha * (v.likelihood_subscore / 10.0) + p.beta * v.epss +
           p.gamma_exploit * (v.exploit_exists ? 1.0 : 0.0);
}

double propagation_likelihood(const VulnerabilityRecord& v, const RiskParams& p) {
    return p.delta * (v.scope_change ? 1.0 : 0.0) + p.theta * (v.ransomware ? 1.0 : 0.0);
}

double direct_risk(const VulnerabilityRecord& v, double component_centrality, const RiskParams& p) {
    return exploit_likelihood(v, p) * v.impact_subscore * component_centrality;
}

double cvs(const Asset& asset, const std::string& component_id, const RiskParams& p) {
    double sums[4] = {0.0, 0.0, 0.0, 0.0};  // Critical, High, Medium, Low
    for (const auto& v : asset.vulnerabilities) {
        if (v.component_ref != component_id) continue;
        int bucket = v.cvss_base >= 9.0 ? 0 : v.cvss_base >= 7.0 ? 1 : v.cvss_base >= 4.0 ? 2 : 3;
        sums[bucket] += v.cvss_base;
    }
    const double w[4] = {p.sev_critical, p.sev_high, p.sev_medium, p.sev_low};
    double wsum = w[0] + w[1] + w[2] + w[3];
    if (wsum <= 0.0)
        throw ValidationError("severity weights sum to zero");
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += w[i] * sums[i];
    return acc / wsum;
}

double component_risk(const SystemModel& model, const Asset& asset,
                      const std::string& component_id, const RiskParams& p) {
    DependenceGraph g = build_dependence_graph(model, asset.id);
    CentralityScores scores = centrality(g, p);
    return cvs(asset, component_id, p) * scores.normalized_of(component_id);
}

RiskClass classify_vulnerability(const VulnerabilityRecord& v) {
    switch (v.attack_vector) {
        case AttackVector::Network:
        case AttackVector::Adjacent:
            return RiskClass::NetworkBased;
        default:
            return RiskClass::HostBased;
    }
}

namespace {

// Reverse adjacency of a dependence graph: for each node, who depends on it,
// sorted by (dependent id, weight) for a reproducible traversal order.
using ReverseAdj = std::unordered_map<std::string, std::vector<std::pair<std::string, double>>>;

ReverseAdj reverse_adjacency(const DependenceGraph& g) {
    ReverseAdj radj;
    for (const auto& e : g.edges) radj[e.to].push_back({e.from, e.weight});
    for (auto& [id, lst] : radj) std::sort(lst.begin(), lst.end());
    return radj;
}

struct PropResult {
    double weight = 0.0;
    int dependents = 0;
};

PropResult propagation_weight_impl(const ReverseAdj& radj, const std::string& source) {
    PropResult r;
    std::unordered_set<std::string> seen{source};
    std::deque<std::pair<std::string, double>> q{{source, 0.0}};
    while (!q.empty()) {
        auto [v, cum] = q.front();
        q.pop_front();
        auto it = radj.find(v);
        if (it == radj.end()) continue;
        for (const auto& [u, w] : it->second) {
            if (!seen.insert(u).second) continue;
            double cw = cum + w;
            r.weight += cw;
            r.dependents += 1;
            q.push_back({u, cw});
        }
    }
    return r;
}

}  // namespace

double propagation_weight(const DependenceGraph& g, const std::string& component_id) {
    if (!g.has_node(component_id))
        throw ValidationError("component '" + component_id + "' is not in graph scope '" +
                              g.scope + "'");
    return propagation_weight_impl(reverse_adjacency(g), component_id).weight;
}

double indirect_risk(const VulnerabilityRecord& v, const std::string& component_id,
                     const DependenceGraph& g, const RiskParams& p) {
    double pl = propagation_likelihood(v, p);
    if (pl < p.sigma) return 0.0;
    double w = propagation_weight(g, component_id);
    if (w <= 0.0) return 0.0;
    return pl * w * v.impact_subscore;
}

namespace {

VulnRiskBreakdown breakdown_for(const VulnerabilityRecord& v, const Asset& asset,
                                double local_centrality, const PropResult& prop,
                                const std::string& prop_scope, const RiskParams& p) {
    VulnRiskBreakdown b;
    b.cve_id = v.cve_id;
    b.component_id = v.component_ref;
    b.asset_id = asset.id;
    b.exploit_likelihood = exploit_likelihood(v, p);
    b.propagation_likelihood = propagation_likelihood(v, p);
    b.direct = b.exploit_likelihood * v.impact_subscore * local_centrality;
    bool gated = b.propagation_likelihood < p.sigma || prop.weight <= 0.0;
    b.indirect = gated ? 0.0 : b.propagation_likelihood * prop.weight * v.impact_subscore;
    b.total = b.direct + b.indirect;

    b.explanation.push_back("exploit likelihood " + fmt(b.exploit_likelihood) + " = " +
                            fmt(p.alpha) + "*(" + fmt(v.likelihood_subscore) + "/10) + " +
                            fmt(p.beta) + "*" + fmt(v.epss) + " + " + fmt(p.gamma_exploit) + "*" +
                            (v.exploit_exists ? "1" : "0"));
    b.explanation.push_back("propagation likelihood " + fmt(b.propagation_likelihood) + " = " +
                            fmt(p.delta) + "*" + (v.scope_change ? "1" : "0") + " + " +
                            fmt(p.theta) + "*" + (v.ransomware ? "1" : "0"));
    b.explanation.push_back("component centrality " + fmt(local_centrality) + " of '" +
                            v.component_ref + "' within asset '" + asset.id + "'");
    if (b.indirect > 0.0) {
        b.explanation.push_back("propagates to " + std::to_string(prop.dependents) +
                                " dependent(s) in " + prop_scope + ", cumulative weight " +
                                fmt(prop.weight));
    } else if (b.propagation_likelihood < p.sigma) {
        b.explanation.push_back("propagation gated: likelihood below sigma " + fmt(p.sigma));
    } else {
        b.explanation.push_back("propagation gated: no incoming dependencies in " + prop_scope);
    }
    return b;
}

}  // namespace

VulnRiskBreakdown vulnerability_risk(const VulnerabilityRecord& v, const Asset& asset,
                                     const SystemModel& model, const DependenceGraph& g,
                                     const RiskParams& p) {
    DependenceGraph local = build_dependence_graph(model, asset.id);
    CentralityScores scores = centrality(local, p);
    if (!g.has_node(v.component_ref))
        throw ValidationError("component '" + v.component_ref + "' is not in graph scope '" +
                              g.scope + "'");
    PropResult prop = propagation_weight_impl(reverse_adjacency(g), v.component_ref);
    return breakdown_for(v, asset, scores.normalized_of(v.component_ref), prop, g.scope, p);
}

// ---------------- attack paths ----------------

namespace {

struct CommAdj {
    std::vector<std::string> nodes;
    std::unordered_map<std::string, int> index;
    // neighbor lists sorted by node id; parallel weight per neighbor
    std::vector<std::vector<std::pair<std::string, double>>> adj;
};

CommAdj comm_adjacency(const CommunicationGraph& g) {
    CommAdj c;
    c.nodes = g.nodes;
    c.index = g.index;
    c.adj.resize(g.nodes.size());
    for (const auto& e : g.edges) {
        c.adj[c.index.at(e.a)].push_back({e.b, e.weight});
        c.adj[c.index.at(e.b)].push_back({e.a, e.weight});
    }
    for (auto& lst : c.adj) std::sort(lst.begin(), lst.end());
    return c;
}

constexpr double kTieTol = 1e-12;

std::vector<double> dijkstra_from(const CommAdj& c, const std::string& start) {
    std::vector<double> dist(c.nodes.size(), std::numeric_limits<double>::infinity());
    int s = c.index.at(start);
    dist[s] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.push({0.0, s});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u] + kTieTol) continue;
        for (const auto& [vid, w] : c.adj[u]) {
            int v = c.index.at(vid);
            double nd = d + w;
            if (nd < dist[v] - kTieTol) {
                dist[v] = nd;
                pq.push({nd, v});
            }
        }
    }
    return dist;
}

// Shortest path source->target, ties resolved to the lexicographically
// smallest node sequence: with exact distances-to-target in hand, always
// step to the smallest-id neighbor that stays on a shortest path.
std::optional<AttackPath> lex_shortest_path(const CommAdj& c, const std::string& source,
                                            const std::string& target,
                                            const std::vector<double>& dist_to_target) {
    int s = c.index.at(source);
    if (std::isinf(dist_to_target[s])) return std::nullopt;
    AttackPath path;
    path.source = source;
    path.target = target;
    path.total_weight = dist_to_target[s];
    path.nodes.push_back(source);
    std::string cur = source;
    while (cur != target) {
        int u = c.index.at(cur);
        const std::string* next = nullptr;
        double step = 0.0;
        for (const auto& [vid, w] : c.adj[u]) {
            int v = c.index.at(vid);
            if (std::abs(w + dist_to_target[v] - dist_to_target[u]) <= kTieTol) {
                next = &vid;
                step = w;
                break;  // neighbors are sorted, first hit is the smallest id
            }
        }
        if (!next) return std::nullopt;  // numerically impossible on a consistent metric
        (void)step;
        path.nodes.push_back(*next);
        cur = *next;
    }
    return path;
}

struct PathSet {
    std::vector<AttackPath> paths;
    std::map<std::string, int> npaths;  // per-asset literal occurrence count
    std::vector<std::string> critical;
    std::vector<std::string> notices;
};

PathSet retained_paths(const SystemModel& model, const RiskParams& p,
                       const std::map<std::string, AssetCriticality>& crit) {
    PathSet out;
    for (const auto& a : model.assets)
        if (crit.at(a.id).score > p.criticality_threshold) out.critical.push_back(a.id);
    std::sort(out.critical.begin(), out.critical.end());
    if (out.critical.empty()) {
        out.notices.push_back("no assets above criticality threshold " +
                              fmt(p.criticality_threshold) + "; no attack paths retained");
        return out;
    }
    if (model.entry_points.empty()) {
        out.notices.push_back("no entry points declared; network risk not computed");
        return out;
    }
    CommAdj c = comm_adjacency(build_communication_graph(model));
    // One Dijkstra per critical asset serves every entry point; paths are
    // retained entry-major to match the reporting order.
    std::map<std::string, std::vector<double>> dists;
    for (const auto& target : out.critical) dists[target] = dijkstra_from(c, target);
    for (const auto& entry : model.entry_points) {
        for (const auto& target : out.critical) {
            auto path = lex_shortest_path(c, entry, target, dists.at(target));
            if (!path) {
                out.notices.push_back("critical asset '" + target + "' unreachable from entry '" +
                                      entry + "'");
                continue;
            }
            out.paths.push_back(std::move(*path));
        }
    }
    std::set<std::string> asset_ids;
    for (const auto& a : model.assets) asset_ids.insert(a.id);
    for (const auto& path : out.paths)
        for (const auto& node : path.nodes)
            if (asset_ids.count(node)) out.npaths[node] += 1;
    if (p.dedup_paths)
        for (auto& [id, k] : out.npaths) k = 1;
    return out;
}

}  // namespace

std::vector<AttackPath> shortest_attack_paths(const SystemModel& model, const RiskParams& p) {
    DependenceGraph sys = build_dependence_graph(model, kSystemScope);
    CentralityScores syscent = centrality(sys, p);
    std::map<std::string, AssetCriticality> crit;
    for (const auto& a : model.assets) crit[a.id] = asset_criticality(model, a, p, syscent);
    PathSet ps = retained_paths(model, p, crit);
    if (ps.critical.empty())
        throw ValidationError("no critical assets above threshold " +
                              fmt(p.criticality_threshold));
    return ps.paths;
}

double network_risk(const std::vector<AttackPath>& paths, const SystemModel& model,
                    const RiskParams& p) {
    DependenceGraph sys = build_dependence_graph(model, kSystemScope);
    CentralityScores syscent = centrality(sys, p);
    std::set<std::string> asset_ids;
    for (const auto& a : model.assets) asset_ids.insert(a.id);
    std::map<std::string, int> npaths;
    for (const auto& path : paths)
        for (const auto& node : path.nodes)
            if (asset_ids.count(node)) npaths[node] += 1;
    if (p.dedup_paths)
        for (auto& [id, k] : npaths) k = 1;
    double total = 0.0;
    for (const auto& a : model.assets) {
        auto it = npaths.find(a.id);
        if (it == npaths.end()) continue;
        for (const auto& v : a.vulnerabilities) {
            if (classify_vulnerability(v) != RiskClass::NetworkBased) continue;
            total += it->second * exploit_likelihood(v, p) * v.impact_subscore *
                     syscent.normalized_of(v.component_ref);
        }
    }
    return total;
}

// ---------------- full pipeline ----------------

RiskReport system_risk(const SystemModel& model, const RiskParams& p) {
    validate_params(p);
    RiskReport r;
    auto t_start = std::chrono::steady_clock::now();

    // Structural phase: centralities and propagation weights.
    std::map<std::string, CentralityScores> local;
    for (const auto& a : model.assets)
        local[a.id] = centrality(build_dependence_graph(model, a.id), p);
    std::unordered_map<std::string, PropResult> prop;
    std::unordered_map<std::string, std::string> prop_scope;
    for (const auto& h : model.hosts) {
        DependenceGraph hg = build_host_dependence_graph(model, h);
        ReverseAdj radj = reverse_adjacency(hg);
        for (const auto& n : hg.nodes) {
            prop[n] = propagation_weight_impl(radj, n);
            prop_scope[n] = "host '" + h.id + "'";
        }
    }
    DependenceGraph sys = build_dependence_graph(model, kSystemScope);
    CentralityScores syscent = centrality(sys, p);
    r.timings.graph_ms = ms_since(t_start);

    // Per-vulnerability phase.
    auto t_vuln = std::chrono::steady_clock::now();
    std::map<std::string, double> asset_sum;
    for (const auto& a : model.assets) {
        double sum = 0.0;
        const CentralityScores& lc = local.at(a.id);
        for (const auto& v : a.vulnerabilities) {
            VulnRiskBreakdown b = breakdown_for(v, a, lc.normalized_of(v.component_ref),
                                                prop.at(v.component_ref),
                                                prop_scope.at(v.component_ref), p);
            sum += b.total;
            r.vulnerabilities.push_back(std::move(b));
        }
        asset_sum[a.id] = sum;
    }
    r.timings.vuln_ms = ms_since(t_vuln);

    // Criticality, paths, network and host aggregation.
    auto t_path = std::chrono::steady_clock::now();
    std::map<std::string, AssetCriticality> crit;
    for (const auto& a : model.assets) crit[a.id] = asset_criticality(model, a, p, syscent);
    PathSet ps = retained_paths(model, p, crit);
    r.paths = ps.paths;
    r.critical_assets = ps.critical;
    r.notices = ps.notices;

    r.network = 0.0;
    for (const auto& a : model.assets) {
        auto it = ps.npaths.find(a.id);
        if (it == ps.npaths.end()) continue;
        for (const auto& v : a.vulnerabilities) {
            if (classify_vulnerability(v) != RiskClass::NetworkBased) continue;
            r.network += it->second * exploit_likelihood(v, p) * v.impact_subscore *
                         syscent.normalized_of(v.component_ref);
        }
    }
    r.host_total = 0.0;
    for (const auto& h : model.hosts) {
        double hr = 0.0;
        for (const auto& aid : h.assets) hr += crit.at(aid).score * asset_sum.at(aid);
        r.host_risk[h.id] = hr;
        r.host_total += hr;
    }
    r.system = r.network + r.host_total;
    r.timings.path_ms = ms_since(t_path);

    for (const auto& a : model.assets) {
        AssetReport ar;
        ar.id = a.id;
        ar.risk = asset_sum.at(a.id);
        ar.centrality = asset_centrality(model, a, syscent);
        ar.criticality = crit.at(a.id);
        auto it = ps.npaths.find(a.id);
        ar.path_count = it == ps.npaths.end() ? 0 : it->second;
        r.assets.push_back(std::move(ar));
        for (const auto& c : a.components) {
            ComponentReport cr;
            cr.id = c.id;
            cr.asset_id = a.id;
            cr.cvs = cvs(a, c.id, p);
            cr.local_centrality = local.at(a.id).normalized_of(c.id);
            cr.system_centrality = syscent.normalized_of(c.id);
            cr.risk = cr.cvs * cr.local_centrality;
            r.components.push_back(std::move(cr));
        }
    }
    r.timings.total_ms = ms_since(t_start);

    auto violations = audit_report(r, model, p);
    if (!violations.empty())
        throw std::logic_error("risk report failed self-audit: " + violations.front());
    return r;
}

double asset_risk(const SystemModel& model, const std::string& asset_id, const RiskParams& p) {
    if (!model.find_asset(asset_id))
        throw ValidationError("unknown asset '" + asset_id + "'");
    RiskReport r = system_risk(model, p);
    return r.asset(asset_id)->risk;
}

double host_risk(const SystemModel& model, const std::string& host_id, const RiskParams& p) {
    if (!model.find_host(host_id))
        throw ValidationError("unknown host '" + host_id + "'");
    RiskReport r = system_risk(model, p);
    return r.host_risk.at(host_id);
}

std::vector<std::string> audit_report(const RiskReport& r, const SystemModel& model,
                                      const RiskParams& p) {
    std::vector<std::string> bad;
    auto close = [](double a, double b) {
        return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    std::map<std::string, double> asset_sum;
    for (const auto& v : r.vulnerabilities) {
        if (!close(v.total, v.direct + v.indirect))
            bad.push_back("vulnerability " + v.key() + ": total != direct + indirect");
        if (v.direct < 0 || v.indirect < 0)
            bad.push_back("vulnerability " + v.key() + ": negative risk");
        asset_sum[v.asset_id] += v.total;
    }
    for (const auto& a : r.assets) {
        double expect = asset_sum.count(a.id) ? asset_sum.at(a.id) : 0.0;
        if (!close(a.risk, expect))
            bad.push_back("asset " + a.id + ": risk != sum of vulnerability totals");
    }
    double host_total = 0.0;
    for (const auto& h : model.hosts) {
        double hr = 0.0;
        for (const auto& aid : h.assets) {
            const AssetReport* a = r.asset(aid);
            if (!a) continue;
            hr += a->criticality.score * a->risk;
        }
        auto it = r.host_risk.find(h.id);
        if (it == r.host_risk.end() || !close(it->second, hr))
            bad.push_back("host " + h.id + ": risk != criticality-weighted asset sum");
        host_total += hr;
    }
    if (!close(r.host_total, host_total))
        bad.push_back("host total != sum of host risks");
    if (!close(r.system, r.network + r.host_total))
        bad.push_back("system != network + host total");

    // Path invariants: consecutive nodes share a communication edge and the
    // declared weight is the edge-weight sum.
    CommunicationGraph cg = build_communication_graph(model);
    std::map<std::pair<std::string, std::string>, double> ew;
    for (const auto& e : cg.edges) {
        auto key = e.a < e.b ? std::make_pair(e.a, e.b) : std::make_pair(e.b, e.a);
        ew[key] = e.weight;
    }
    for (const auto& path : r.paths) {
        double sum = 0.0;
        bool ok = !path.nodes.empty() && path.nodes.front() == path.source &&
                  path.nodes.back() == path.target;
        for (size_t i = 0; ok && i + 1 < path.nodes.size(); ++i) {
            auto key = path.nodes[i] < path.nodes[i + 1]
                           ? std::make_pair(path.nodes[i], path.nodes[i + 1])
                           : std::make_pair(path.nodes[i + 1], path.nodes[i]);
            auto it = ew.find(key);
            if (it == ew.end()) {
                ok = false;
                break;
            }
            sum += it->second;
        }
        if (!ok || !close(sum, path.total_weight))
            bad.push_back("attack path " + path.source + "->" + path.target +
                          ": nodes and weight disagree with the communication graph");
    }
    (void)p;
    return bad;
}

nlohmann::ordered_json report_to_json(const RiskReport& r, const SystemModel& model,
                                      const RiskParams& p) {
    ordered_json j;
    j["schema"] = "vulrg-report/1";
    j["scope"] = "system";
    j["totals"] = {{"system", r.system}, {"network", r.network}, {"host_based", r.host_total}};
    j["hosts"] = ordered_json::array();
    for (const auto& h : model.hosts)
        j["hosts"].push_back({{"id", h.id}, {"risk", r.host_risk.at(h.id)}});
    j["assets"] = ordered_json::array();
    for (const auto& a : r.assets) {
        j["assets"].push_back({{"id", a.id},
                               {"risk", a.risk},
                               {"centrality", a.centrality},
                               {"criticality_score", a.criticality.score},
                               {"criticality_level", a.criticality.level},
                               {"criticality_overridden", a.criticality.overridden},
                               {"path_count", a.path_count}});
    }
    j["critical_assets"] = r.critical_assets;
    j["attack_paths"] = ordered_json::array();
    for (const auto& path : r.paths) {
        j["attack_paths"].push_back({{"source", path.source},
                                     {"target", path.target},
                                     {"nodes", path.nodes},
                                     {"total_weight", path.total_weight}});
    }
    j["components"] = ordered_json::array();
    for (const auto& c : r.components) {
        j["components"].push_back({{"id", c.id},
                                   {"asset", c.asset_id},
                                   {"cvs", c.cvs},
                                   {"local_centrality", c.local_centrality},
                                   {"system_centrality", c.system_centrality},
                                   {"risk", c.risk}});
    }
    j["vulnerabilities"] = ordered_json::array();
    for (const auto& v : r.vulnerabilities) {
        j["vulnerabilities"].push_back({{"cve_id", v.cve_id},
                                        {"component", v.component_id},
                                        {"asset", v.asset_id},
                                        {"exploit_likelihood", v.exploit_likelihood},
                                        {"propagation_likelihood", v.propagation_likelihood},
                                        {"direct", v.direct},
                                        {"indirect", v.indirect},
                                        {"total", v.total},
                                        {"explanation", v.explanation}});
    }
    j["notices"] = r.notices;
    (void)p;
    return j;
}

}  // namespace vulrg
