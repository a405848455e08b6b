#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "vulrg/model.hpp"

namespace vulrg {

// Scope name used for the system-wide dependence graph.
inline constexpr const char* kSystemScope = "system";

struct DependenceGraph {
    std::string scope;                  // kSystemScope or an asset id
    std::vector<std::string> nodes;     // stable declaration order
    std::vector<DependencyEdge> edges;  // weights resolved, self-loops excluded
    std::unordered_map<std::string, int> index;

    bool has_node(const std::string& id) const { return index.count(id) != 0; }
};

struct CommunicationGraph {
    std::vector<std::string> nodes;  // asset ids then declared waypoints
    std::vector<CommunicationEdge> edges;  // duplicates merged by minimum weight
    std::unordered_map<std::string, int> index;

    bool has_node(const std::string& id) const { return index.count(id) != 0; }
};

struct CentralityScores {
    std::vector<std::string> nodes;
    std::vector<double> degree;
    std::vector<double> betweenness;
    std::vector<double> pagerank;
    std::vector<double> combined;
    std::vector<double> normalized;  // combined / max(combined); top node(s) exactly 1.0
    std::unordered_map<std::string, int> index;

    double normalized_of(const std::string& id) const;
};

struct AssetCriticality {
    double score = 0.0;
    int level = 0;
    bool overridden = false;
};

// Dependence graph for one asset (intra edges only) or the whole system
// (all components, intra + cross edges, plus asset-level NR nodes when NR
// edges exist; those nodes are named "asset:<id>"). Unknown scope ids throw.
DependenceGraph build_dependence_graph(const SystemModel& model, const std::string& scope);

// Dependence graph over the components of one host's assets: their intra
// edges plus every cross edge whose both endpoints live on the host.
DependenceGraph build_host_dependence_graph(const SystemModel& model, const Host& host);

// Undirected communication graph over assets and declared waypoints.
CommunicationGraph build_communication_graph(const SystemModel& model);

// Degree, betweenness, PageRank, their mean, and the max-normalized mean.
// Degree and betweenness treat the graph as unweighted and directed;
// betweenness counts path endpoints and normalizes by n(n-1). PageRank runs
// along the stored depends-on direction so foundational nodes accumulate
// rank, with uniform redistribution of dangling mass. Empty graphs throw.
CentralityScores centrality(const DependenceGraph& g, const RiskParams& p);

// Mean of the asset's components' normalized scores from the system-wide
// graph. Throws for assets with no components.
double asset_centrality(const SystemModel& model, const Asset& asset,
                        const CentralityScores& system_scores);

// score = w1 * centrality_mean + w2 * (business_level * 0.15),
// level = floor(score * 10). The tiny epsilon guards against values like
// 0.9 * 10 landing one ulp under the integer they represent.
AssetCriticality criticality_from(double centrality_mean, int business_level, const RiskParams& p);

// Full per-asset criticality: an inventory override wins outright, otherwise
// criticality_from over the system-wide centrality mean.
AssetCriticality asset_criticality(const SystemModel& model, const Asset& asset,
                                   const RiskParams& p, const CentralityScores& system_scores);

// Row i, column j holds the weight of edge i->j (i depends on j), zero
// otherwise; node order matches g.nodes.
std::vector<std::vector<double>> adjacency_matrix(const DependenceGraph& g);

// "from to weight kind" lines, one per edge, in stored order.
std::string export_edge_list(const DependenceGraph& g);

// Node-id header line followed by the adjacency matrix rows.
std::string export_matrix(const DependenceGraph& g);

}  // namespace vulrg
