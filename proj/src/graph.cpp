#include "vulrg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace vulrg {

double CentralityScores::normalized_of(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end())
        throw ValidationError("no centrality score for node '" + id + "'");
    return normalized[it->second];
}

namespace {

void finish(DependenceGraph& g) {
    g.index.clear();
    for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) g.index[g.nodes[i]] = i;
}

}  // namespace

DependenceGraph build_dependence_graph(const SystemModel& model, const std::string& scope) {
    DependenceGraph g;
    g.scope = scope;
    if (scope == kSystemScope) {
        for (const auto& a : model.assets)
            for (const auto& c : a.components) g.nodes.push_back(c.id);
        for (const auto& a : model.assets)
            for (const auto& e : a.intra_edges) g.edges.push_back(e);
        std::set<std::string> nr_nodes;
        for (const auto& e : model.cross_asset_edges) {
            if (e.kind == EdgeKind::NR) {
                // Asset-level network reliance: modeled as nodes of their own
                // so they participate in system-wide centrality.
                DependencyEdge lifted = e;
                lifted.from = "asset:" + e.from;
                lifted.to = "asset:" + e.to;
                nr_nodes.insert(lifted.from);
                nr_nodes.insert(lifted.to);
                g.edges.push_back(std::move(lifted));
            } else {
                g.edges.push_back(e);
            }
        }
        for (const auto& n : nr_nodes) g.nodes.push_back(n);
        finish(g);
        return g;
    }
    const Asset* a = model.find_asset(scope);
    if (!a)
        throw ValidationError("unknown dependence graph scope '" + scope + "'");
    for (const auto& c : a->components) g.nodes.push_back(c.id);
    g.edges = a->intra_edges;
    finish(g);
    return g;
}

DependenceGraph build_host_dependence_graph(const SystemModel& model, const Host& host) {
    DependenceGraph g;
    g.scope = "host:" + host.id;
    std::set<std::string> member;
    for (const auto& aid : host.assets) {
        const Asset* a = model.find_asset(aid);
        if (!a)
            throw ValidationError("host '" + host.id + "' references unknown asset '" + aid + "'");
        for (const auto& c : a->components) {
            g.nodes.push_back(c.id);
            member.insert(c.id);
        }
    }
    for (const auto& aid : host.assets)
        for (const auto& e : model.find_asset(aid)->intra_edges) g.edges.push_back(e);
    for (const auto& e : model.cross_asset_edges) {
        if (e.kind == EdgeKind::NR) continue;
        if (member.count(e.from) && member.count(e.to)) g.edges.push_back(e);
    }
    finish(g);
    return g;
}

CommunicationGraph build_communication_graph(const SystemModel& model) {
    CommunicationGraph g;
    for (const auto& a : model.assets) g.nodes.push_back(a.id);
    for (const auto& w : model.waypoints) g.nodes.push_back(w);
    for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) g.index[g.nodes[i]] = i;

    // Duplicate declarations of the same unordered pair merge to the
    // minimum weight.
    std::map<std::pair<std::string, std::string>, double> merged;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& e : model.communication_edges) {
        auto key = e.a < e.b ? std::make_pair(e.a, e.b) : std::make_pair(e.b, e.a);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged[key] = e.weight;
            order.push_back(key);
        } else {
            it->second = std::min(it->second, e.weight);
        }
    }
    for (const auto& key : order)
        g.edges.push_back({key.first, key.second, merged.at(key)});
    return g;
}

CentralityScores centrality(const DependenceGraph& g, const RiskParams& p) {
    const int n = static_cast<int>(g.nodes.size());
    if (n == 0)
        throw ValidationError("centrality of an empty graph");

    CentralityScores s;
    s.nodes = g.nodes;
    s.index = g.index;
    s.degree.assign(n, 0.0);
    s.betweenness.assign(n, 0.0);
    s.pagerank.assign(n, 0.0);
    s.combined.assign(n, 0.0);
    s.normalized.assign(n, 0.0);
    if (n == 1) {
        s.pagerank[0] = 1.0;
        s.combined[0] = 1.0 / 3.0;
        s.normalized[0] = 1.0;
        return s;
    }

    // Unweighted simple digraph view: self-loops and repeated arcs dropped.
    std::vector<std::vector<int>> adj(n), radj(n);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : g.edges) {
        int a = g.index.at(e.from), b = g.index.at(e.to);
        if (a == b || !seen.insert({a, b}).second) continue;
        adj[a].push_back(b);
        radj[b].push_back(a);
    }
    for (auto& l : adj) std::sort(l.begin(), l.end());

    for (int i = 0; i < n; ++i)
        s.degree[i] = static_cast<double>(adj[i].size() + radj[i].size()) / (n - 1);

    // Brandes accumulation, endpoints included: each source credits every
    // node it reaches, and every reached target credits itself on top of the
    // usual pair-dependency share.
    for (int src = 0; src < n; ++src) {
        std::vector<int> dist(n, -1);
        std::vector<double> sigma(n, 0.0);
        std::vector<std::vector<int>> preds(n);
        std::vector<int> order;
        dist[src] = 0;
        sigma[src] = 1.0;
        std::deque<int> q{src};
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            order.push_back(v);
            for (int w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        std::vector<double> delta(n, 0.0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int w = *it;
            for (int v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != src) s.betweenness[w] += delta[w] + 1.0;
        }
        s.betweenness[src] += static_cast<double>(order.size()) - 1.0;
    }
    const double bnorm = static_cast<double>(n) * (n - 1);
    for (int i = 0; i < n; ++i) s.betweenness[i] /= bnorm;

    // PageRank along the stored depends-on arcs; dangling mass spread
    // uniformly. Converges by L1 distance.
    const double d = p.pagerank_damping;
    std::vector<double> pr(n, 1.0 / n), nxt(n);
    for (int iter = 0; iter < 200; ++iter) {
        double dangling = 0.0;
        for (int i = 0; i < n; ++i)
            if (adj[i].empty()) dangling += pr[i];
        double base = (1.0 - d) / n + d * dangling / n;
        std::fill(nxt.begin(), nxt.end(), base);
        for (int u = 0; u < n; ++u) {
            if (adj[u].empty()) continue;
            double share = d * pr[u] / adj[u].size();
            for (int v : adj[u]) nxt[v] += share;
        }
        double err = 0.0;
        for (int i = 0; i < n; ++i) err += std::abs(nxt[i] - pr[i]);
        pr.swap(nxt);
        if (err < 1e-9) break;
    }
    s.pagerank = pr;

    double mx = 0.0;
    for (int i = 0; i < n; ++i) {
        s.combined[i] = (s.degree[i] + s.betweenness[i] + s.pagerank[i]) / 3.0;
        mx = std::max(mx, s.combined[i]);
    }
    for (int i = 0; i < n; ++i) s.normalized[i] = mx > 0.0 ? s.combined[i] / mx : 1.0;
    return s;
}

double asset_centrality(const SystemModel&, const Asset& asset,
                        const CentralityScores& system_scores) {
    if (asset.components.empty())
        throw ValidationError("asset '" + asset.id + "' has no components to average");
    double sum = 0.0;
    for (const auto& c : asset.components) sum += system_scores.normalized_of(c.id);
    return sum / asset.components.size();
}

AssetCriticality criticality_from(double centrality_mean, int business_level, const RiskParams& p) {
    AssetCriticality c;
    c.score = p.w1 * centrality_mean + p.w2 * (business_level * 0.15);
    c.level = static_cast<int>(std::floor(c.score * 10.0 + 1e-9));
    return c;
}

AssetCriticality asset_criticality(const SystemModel& model, const Asset& asset,
                                   const RiskParams& p, const CentralityScores& system_scores) {
    auto it = model.criticality_overrides.find(asset.id);
    if (it != model.criticality_overrides.end()) {
        AssetCriticality c;
        c.score = it->second;
        c.level = static_cast<int>(std::floor(c.score * 10.0 + 1e-9));
        c.overridden = true;
        return c;
    }
    return criticality_from(asset_centrality(model, asset, system_scores),
                            asset.business_criticality_level, p);
}

std::vector<std::vector<double>> adjacency_matrix(const DependenceGraph& g) {
    const size_t n = g.nodes.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (const auto& e : g.edges)
        m[g.index.at(e.from)][g.index.at(e.to)] = e.weight;
    return m;
}

std::string export_edge_list(const DependenceGraph& g) {
    std::ostringstream os;
    for (const auto& e : g.edges)
        os << e.from << " " << e.to << " " << e.weight << " " << to_string(e.kind) << "\n";
    return os.str();
}

std::string export_matrix(const DependenceGraph& g) {
    std::ostringstream os;
    for (size_t i = 0; i < g.nodes.size(); ++i)
        os << (i ? " " : "") << g.nodes[i];
    os << "\n";
    auto m = adjacency_matrix(g);
    for (const auto& row : m) {
        for (size_t j = 0; j < row.size(); ++j)
            os << (j ? " " : "") << row[j];
        os << "\n";
    }
    return os.str();
}

}  // namespace vulrg
