#pragma once

// Property suites shared by the properties binary and the acceptance gate.
// Every suite returns how many cases it examined and which ones failed, so
// both callers can insist on zero violations and still print useful detail
// when something breaks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vulrg/graph.hpp"
#include "vulrg/model.hpp"
#include "vulrg/rank.hpp"
#include "vulrg/risk.hpp"
#include "vulrg/testgen.hpp"

namespace props {

struct PropertyResult {
    std::string name;
    int checked = 0;  // generated cases examined
    int samples = 0;  // inner comparisons actually performed, to rule out vacuous passes
    int violations = 0;
    std::vector<std::string> failures;  // first dozen only, to keep output readable

    bool ok() const { return violations == 0; }
};

inline void record(PropertyResult& r, const std::string& msg) {
    ++r.violations;
    if (r.failures.size() < 12) r.failures.push_back(msg);
}

inline std::string summarize(const PropertyResult& r) {
    std::ostringstream out;
    out << r.name << ": " << r.checked << " cases, " << r.samples << " comparisons, "
        << r.violations << " violation(s)";
    for (const auto& f : r.failures) out << "\n    " << f;
    return out.str();
}

// ---------------------------------------------------------------------------
// (a) Shortest attack paths vs. exhaustive simple-path search.
//
// Random communication topologies: one waypoint entry plus up to seven
// assets, edges drawn with p = 0.45, weights from a small dyadic set so
// distinct routes frequently tie on total weight and the lexicographic
// tie-break is actually exercised. Every asset gets an explicit criticality
// override (0.9 or 0.1) so the critical set is chosen by the generator, not
// by centrality arithmetic.
// ---------------------------------------------------------------------------

inline vulrg::SystemModel sap_model(std::mt19937& rng, int n_nodes) {
    using namespace vulrg;
    SystemModel m;
    Host h;
    h.id = "h0";
    for (int k = 1; k < n_nodes; ++k) {
        Asset a;
        a.id = "a" + std::to_string(k);
        a.name = a.id;
        a.host_ref = "h0";
        a.ip = "10.0.0." + std::to_string(k);
        a.mac = "02:00:00:00:00:03";
        a.subnet = "10.0.0.0/24";
        a.business_criticality_level = 1 + k % 6;
        ComponentNode c;
        c.id = a.id + ".c0";
        c.vendor = "v";
        c.product = "p";
        c.version = "1";
        c.part = Part::Os;
        a.components.push_back(std::move(c));
        h.assets.push_back(a.id);
        m.assets.push_back(std::move(a));
    }
    m.hosts.push_back(std::move(h));
    m.waypoints.push_back("wp0");
    m.entry_points.push_back("wp0");

    std::vector<std::string> nodes{"wp0"};
    for (const auto& a : m.assets) nodes.push_back(a.id);
    const double weights[5] = {0.5, 1.0, 1.5, 2.0, 3.0};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> wpick(0, 4);
    for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = i + 1; j < nodes.size(); ++j)
            if (unit(rng) < 0.45)
                m.communication_edges.push_back({nodes[i], nodes[j], weights[wpick(rng)]});

    std::uniform_int_distribution<int> cpick(0, 2);
    bool any_critical = false;
    for (const auto& a : m.assets) {
        bool critical = cpick(rng) == 0;
        any_critical = any_critical || critical;
        m.criticality_overrides[a.id] = critical ? 0.9 : 0.1;
    }
    if (!any_critical) {
        std::uniform_int_distribution<size_t> pick(0, m.assets.size() - 1);
        m.criticality_overrides[m.assets[pick(rng)].id] = 0.9;
    }
    return m;
}

namespace detail {

using CommAdjacency = std::map<std::string, std::vector<std::pair<std::string, double>>>;

struct SapBest {
    bool found = false;
    double weight = 0.0;
    std::vector<std::string> nodes;
};

inline void sap_consider(SapBest& best, double w, const std::vector<std::string>& path) {
    if (!best.found || w < best.weight - 1e-12) {
        best.found = true;
        best.weight = w;
        best.nodes = path;
        return;
    }
    if (w <= best.weight + 1e-12 && path < best.nodes) {
        best.weight = std::min(best.weight, w);
        best.nodes = path;
    }
}

inline void sap_dfs(const CommAdjacency& adj, const std::string& target,
                    std::vector<std::string>& path, std::set<std::string>& used, double w,
                    SapBest& best) {
    const std::string& cur = path.back();
    if (cur == target) {
        sap_consider(best, w, path);
        return;
    }
    auto it = adj.find(cur);
    if (it == adj.end()) return;
    for (const auto& [next, wt] : it->second) {
        if (used.count(next)) continue;
        used.insert(next);
        path.push_back(next);
        sap_dfs(adj, target, path, used, w + wt, best);
        path.pop_back();
        used.erase(next);
    }
}

}  // namespace detail

inline PropertyResult sap_suite(int n_graphs = 1000, unsigned seed = 0xA11CE) {
    PropertyResult r;
    r.name = "shortest attack paths vs exhaustive simple-path search";
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> size(2, 8);
    for (int g = 0; g < n_graphs; ++g) {
        std::string tag = "graph " + std::to_string(g) + ": ";
        vulrg::SystemModel m = sap_model(rng, size(rng));
        try {
            vulrg::validate_model(m);
        } catch (const std::exception& e) {
            record(r, tag + "generated model rejected: " + e.what());
            continue;
        }
        vulrg::RiskParams p;
        std::vector<std::string> critical;
        for (const auto& a : m.assets)
            if (m.criticality_overrides.at(a.id) > p.criticality_threshold)
                critical.push_back(a.id);
        std::sort(critical.begin(), critical.end());

        detail::CommAdjacency adj;
        for (const auto& e : m.communication_edges) {
            adj[e.a].push_back({e.b, e.weight});
            adj[e.b].push_back({e.a, e.weight});
        }

        std::vector<vulrg::AttackPath> got;
        try {
            got = vulrg::shortest_attack_paths(m, p);
        } catch (const std::exception& e) {
            record(r, tag + "shortest_attack_paths threw: " + e.what());
            continue;
        }

        ++r.checked;
        size_t gi = 0;
        for (const auto& target : critical) {
            detail::SapBest best;
            std::vector<std::string> path{"wp0"};
            std::set<std::string> used{"wp0"};
            detail::sap_dfs(adj, target, path, used, 0.0, best);
            if (!best.found) continue;  // unreachable targets must be omitted
            if (gi >= got.size()) {
                record(r, tag + "missing path wp0 -> " + target);
                break;
            }
            const vulrg::AttackPath& ap = got[gi++];
            ++r.samples;
            if (ap.source != "wp0" || ap.target != target) {
                record(r, tag + "expected pair wp0 -> " + target + ", got " + ap.source +
                              " -> " + ap.target);
                continue;
            }
            if (std::abs(ap.total_weight - best.weight) > 1e-9)
                record(r, tag + "wp0 -> " + target + " weight " +
                              std::to_string(ap.total_weight) + ", brute force " +
                              std::to_string(best.weight));
            if (ap.nodes != best.nodes)
                record(r, tag + "wp0 -> " + target + " picked a different tie-break sequence");
        }
        if (gi != got.size())
            record(r, tag + std::to_string(got.size() - gi) + " unexpected extra path(s)");
    }
    return r;
}

// ---------------------------------------------------------------------------
// (b) Betweenness vs. enumerating every shortest path.
//
// Digraphs come from bitmasks over all ordered node pairs: exhaustive through
// four nodes, uniformly sampled masks for five and six. Edge weights vary so
// the (unweighted) betweenness must ignore them. The oracle walks the BFS
// layer DAG and credits each node 1/sigma per shortest path it sits on,
// endpoints included, then normalizes by n(n-1) like the production code.
// ---------------------------------------------------------------------------

inline vulrg::DependenceGraph mask_digraph(int n, std::uint64_t mask) {
    vulrg::DependenceGraph g;
    g.scope = "prop";
    for (int i = 0; i < n; ++i) {
        g.nodes.push_back("n" + std::to_string(i));
        g.index[g.nodes.back()] = i;
    }
    int bit = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (mask >> bit & 1)
                g.edges.push_back({g.nodes[i], g.nodes[j], vulrg::EdgeKind::ER,
                                   1.0 + static_cast<double>(bit % 3) * 0.5});
            ++bit;
        }
    return g;
}

inline std::vector<double> brute_betweenness(const vulrg::DependenceGraph& g) {
    int n = static_cast<int>(g.nodes.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : g.edges) adj[g.index.at(e.from)].push_back(g.index.at(e.to));
    std::vector<double> bc(n, 0.0);
    for (int s = 0; s < n; ++s) {
        std::vector<int> dist(n, -1);
        std::vector<int> order{s};
        dist[s] = 0;
        for (size_t head = 0; head < order.size(); ++head)
            for (int w : adj[order[head]])
                if (dist[w] < 0) {
                    dist[w] = dist[order[head]] + 1;
                    order.push_back(w);
                }
        for (int t = 0; t < n; ++t) {
            if (t == s || dist[t] < 0) continue;
            long long n_paths = 0;
            std::vector<long long> visits(n, 0);
            std::vector<int> path{s};
            std::function<void()> walk = [&]() {
                int v = path.back();
                if (v == t) {
                    ++n_paths;
                    for (int u : path) ++visits[u];
                    return;
                }
                if (dist[v] >= dist[t]) return;
                for (int w : adj[v]) {
                    if (dist[w] != dist[v] + 1) continue;
                    path.push_back(w);
                    walk();
                    path.pop_back();
                }
            };
            walk();
            for (int v = 0; v < n; ++v)
                if (visits[v] > 0)
                    bc[v] += static_cast<double>(visits[v]) / static_cast<double>(n_paths);
        }
    }
    double norm = static_cast<double>(n) * (n - 1);
    for (double& x : bc) x /= norm;
    return bc;
}

inline PropertyResult betweenness_suite() {
    PropertyResult r;
    r.name = "betweenness vs exhaustive shortest-path enumeration";
    vulrg::RiskParams p;
    auto check_graph = [&](int n, std::uint64_t mask) {
        vulrg::DependenceGraph g = mask_digraph(n, mask);
        vulrg::CentralityScores s = vulrg::centrality(g, p);
        std::vector<double> want = brute_betweenness(g);
        ++r.checked;
        r.samples += n;
        for (int i = 0; i < n; ++i)
            if (std::abs(s.betweenness[i] - want[i]) > 1e-9) {
                std::ostringstream msg;
                msg << "n=" << n << " mask=" << mask << " node " << g.nodes[i] << ": got "
                    << std::setprecision(17) << s.betweenness[i] << ", oracle " << want[i];
                record(r, msg.str());
                break;
            }
    };
    for (std::uint64_t mask = 0; mask < 4; ++mask) check_graph(2, mask);
    for (std::uint64_t mask = 0; mask < 64; ++mask) check_graph(3, mask);
    for (std::uint64_t mask = 0; mask < 4096; ++mask) check_graph(4, mask);
    std::mt19937_64 rng(0xBC5EED);
    for (int k = 0; k < 500; ++k) check_graph(5, rng() & ((1ull << 20) - 1));
    for (int k = 0; k < 300; ++k) check_graph(6, rng() & ((1ull << 30) - 1));
    return r;
}

// ---------------------------------------------------------------------------
// (c) Patching never increases any aggregate, and patching more never leaves
// more residual risk than patching a subset.
// ---------------------------------------------------------------------------

inline PropertyResult patch_monotonicity_suite(int n_models = 500, unsigned seed = 0x9A7C4) {
    PropertyResult r;
    r.name = "patch monotonicity on random models";
    std::mt19937 rng(seed);
    using Patch = std::pair<std::string, std::string>;
    for (int i = 0; i < n_models; ++i) {
        std::string tag = "model " + std::to_string(i) + ": ";
        vulrg::SystemModel m = vulrg::testgen::random_model(rng);
        try {
            vulrg::validate_model(m);
        } catch (const std::exception& e) {
            record(r, tag + "generated model rejected: " + e.what());
            continue;
        }
        const vulrg::RiskParams& p = m.params;
        std::vector<Patch> all;
        for (const auto& a : m.assets)
            for (const auto& v : a.vulnerabilities) all.push_back({a.id, v.cve_id});
        ++r.checked;
        if (all.empty()) continue;

        auto non_increase = [&](const vulrg::WhatIfResult& w, const std::string& what) {
            ++r.samples;
            if (w.system.delta > 1e-9) record(r, tag + what + " raised system risk");
            if (w.network.delta > 1e-9) record(r, tag + what + " raised network risk");
            if (w.host_total.delta > 1e-9) record(r, tag + what + " raised the host total");
            for (const auto& [hid, lv] : w.hosts)
                if (lv.delta > 1e-9) record(r, tag + what + " raised host " + hid);
            for (const auto& [aid, lv] : w.assets)
                if (lv.delta > 1e-9) record(r, tag + what + " raised asset " + aid);
        };

        std::uniform_int_distribution<size_t> pick(0, all.size() - 1);
        try {
            non_increase(vulrg::what_if(m, p, {all[pick(rng)]}), "single patch");

            std::vector<Patch> subset, superset;
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (const auto& pr : all)
                if (unit(rng) < 0.3) subset.push_back(pr);
            superset = subset;
            std::set<Patch> in_subset(subset.begin(), subset.end());
            std::vector<Patch> rest;
            for (const auto& pr : all)
                if (!in_subset.count(pr)) rest.push_back(pr);
            if (!rest.empty()) {
                std::uniform_int_distribution<size_t> extra(0, rest.size() - 1);
                superset.push_back(rest[extra(rng)]);
            }
            vulrg::WhatIfResult ws = vulrg::what_if(m, p, subset);
            vulrg::WhatIfResult wt = vulrg::what_if(m, p, superset);
            non_increase(ws, "subset patch set");
            non_increase(wt, "superset patch set");
            if (wt.system.after > ws.system.after + 1e-9)
                record(r, tag + "superset left more residual system risk than its subset");
        } catch (const std::exception& e) {
            record(r, tag + "what_if threw: " + e.what());
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// (d) Decomposition identities on the scenario fixtures, plus internal
// consistency between the analytic ranking and a from-scratch recompute.
// ---------------------------------------------------------------------------

inline PropertyResult decomposition_suite(const std::vector<std::string>& fixture_paths) {
    PropertyResult r;
    r.name = "decomposition identities on scenario fixtures";
    for (const auto& path : fixture_paths) {
        std::string tag = path.substr(path.rfind('/') + 1) + ": ";
        vulrg::SystemModel m;
        try {
            m = vulrg::load_system_model(path);
        } catch (const std::exception& e) {
            record(r, tag + "load failed: " + e.what());
            continue;
        }
        const vulrg::RiskParams& p = m.params;
        vulrg::RiskReport rep = vulrg::system_risk(m, p);
        ++r.checked;
        auto rel = [](double a, double b) {
            return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
        };

        double el_max = p.alpha + p.beta + p.gamma_exploit + 1e-12;
        double pl_max = p.delta + p.theta + 1e-12;
        std::map<std::string, double> asset_sum;
        for (const auto& v : rep.vulnerabilities) {
            ++r.samples;
            if (!rel(v.total, v.direct + v.indirect))
                record(r, tag + v.key() + ": total is not direct + indirect");
            if (v.direct < 0 || v.indirect < 0 || v.total < 0)
                record(r, tag + v.key() + ": negative risk component");
            if (v.exploit_likelihood < -1e-12 || v.exploit_likelihood > el_max)
                record(r, tag + v.key() + ": exploit likelihood outside its weight bound");
            if (v.propagation_likelihood < -1e-12 || v.propagation_likelihood > pl_max)
                record(r, tag + v.key() + ": propagation likelihood outside its weight bound");
            asset_sum[v.asset_id] += v.total;
        }
        for (const auto& a : rep.assets)
            if (!rel(a.risk, asset_sum[a.id]))
                record(r, tag + "asset " + a.id + " risk is not the sum of its totals");
        double host_total = 0.0;
        for (const auto& h : m.hosts) {
            double want = 0.0;
            for (const auto& aid : h.assets) {
                const vulrg::AssetReport* ar = rep.asset(aid);
                want += ar->criticality.score * ar->risk;
            }
            auto it = rep.host_risk.find(h.id);
            if (it == rep.host_risk.end()) {
                record(r, tag + "host " + h.id + " missing from the report");
                continue;
            }
            if (!rel(it->second, want))
                record(r, tag + "host " + h.id + " is not its criticality-weighted asset sum");
            host_total += it->second;
        }
        if (!rel(rep.host_total, host_total))
            record(r, tag + "host total is not the sum over hosts");
        if (!rel(rep.system, rep.network + rep.host_total))
            record(r, tag + "system risk is not network + host total");
        if (rep.network < 0 || rep.system < 0) record(r, tag + "negative aggregate");
        for (const auto& msg : vulrg::audit_report(rep, m, p)) record(r, tag + "audit: " + msg);

        vulrg::RiskParams dedup = p;
        dedup.dedup_paths = true;
        vulrg::RiskReport repd = vulrg::system_risk(m, dedup);
        if (repd.network > rep.network + 1e-9)
            record(r, tag + "deduplicated network risk exceeds the raw weighting");

        // The ranking computes each reduction analytically; a from-scratch
        // what-if on the same patch must land on the same residual.
        vulrg::PatchRanking rk = vulrg::rank_patches(m, p, "system");
        if (!rk.entries.empty()) {
            std::set<size_t> probes{0, rk.entries.size() / 2, rk.entries.size() - 1};
            for (size_t ix : probes) {
                const vulrg::PatchEntry& e = rk.entries[ix];
                vulrg::WhatIfResult w = vulrg::what_if(m, p, {{e.asset_id, e.cve_id}});
                if (!rel(w.system.before, e.risk_before))
                    record(r, tag + e.cve_id + "@" + e.asset_id +
                                  ": ranking baseline differs from recompute");
                if (!rel(w.system.after, e.risk_after))
                    record(r, tag + e.cve_id + "@" + e.asset_id +
                                  ": ranking residual differs from recompute");
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// (e) Determinism: reloading and re-running the whole pipeline produces
// byte-identical reports and rankings every time.
// ---------------------------------------------------------------------------

inline PropertyResult determinism_suite(const std::vector<std::string>& fixture_paths,
                                        int runs = 10) {
    PropertyResult r;
    r.name = "determinism across repeated runs";
    for (const auto& path : fixture_paths) {
        std::string tag = path.substr(path.rfind('/') + 1) + ": ";
        std::string first_report, first_ranking;
        for (int k = 0; k < runs; ++k) {
            vulrg::SystemModel m;
            try {
                m = vulrg::load_system_model(path);
            } catch (const std::exception& e) {
                record(r, tag + "load failed: " + e.what());
                break;
            }
            vulrg::RiskReport rep = vulrg::system_risk(m, m.params);
            std::string report = vulrg::report_to_json(rep, m, m.params).dump();
            std::ostringstream ranking;
            ranking << std::setprecision(17);
            for (const auto& e : vulrg::rank_patches(m, m.params, "system").entries)
                ranking << e.rank << ' ' << e.cve_id << '@' << e.asset_id << ' ' << e.reduction
                        << '\n';
            ++r.checked;
            if (k == 0) {
                first_report = std::move(report);
                first_ranking = ranking.str();
                continue;
            }
            ++r.samples;
            if (report != first_report)
                record(r, tag + "run " + std::to_string(k + 1) + " report differs from run 1");
            if (ranking.str() != first_ranking)
                record(r, tag + "run " + std::to_string(k + 1) + " ranking differs from run 1");
        }
    }
    return r;
}

}  // namespace props
