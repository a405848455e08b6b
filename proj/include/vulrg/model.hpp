#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace vulrg {

// Thrown when an inventory or parameter set violates a domain invariant.
// The message names the first violated rule and the offending id.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown for unreadable paths, unwritable outputs and similar I/O trouble.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a runtime configuration is unusable (e.g. live enrichment
// without an API key). Distinct from ValidationError so the CLI can map it
// to the I/O-or-config exit code.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class AttackVector { Network, Adjacent, Local, Physical };
enum class Part { Application, Os, Hardware };
enum class EdgeKind { ER, IR, DR, SR, SCR, NR };

const char* to_string(AttackVector av);
const char* to_string(Part part);
const char* to_string(EdgeKind kind);
AttackVector attack_vector_from(const std::string& s);
Part part_from(const std::string& s);
EdgeKind edge_kind_from(const std::string& s);

// Default edge weight for a dependency kind; embedding and network rules
// weigh 2.0, the rest 1.0.
double kind_default_weight(EdgeKind kind);

struct VulnerabilityRecord {
    std::string cve_id;
    std::string component_ref;
    double cvss_base = 0.0;
    double likelihood_subscore = 0.0;
    double impact_subscore = 0.0;
    double epss = 0.0;
    bool exploit_exists = false;
    bool scope_change = false;
    bool ransomware = false;
    AttackVector attack_vector = AttackVector::Network;
};

struct ComponentNode {
    std::string id;
    std::string vendor;
    std::string product;
    std::string version;
    Part part = Part::Application;
    std::optional<std::string> cpe;
    std::vector<std::string> vulnerabilities;  // cve ids, kept in sync by the loader
};

struct DependencyEdge {
    std::string from;
    std::string to;
    EdgeKind kind = EdgeKind::ER;
    double weight = 2.0;
};

struct CommunicationEdge {
    std::string a;
    std::string b;
    double weight = 1.0;
};

struct Asset {
    std::string id;
    std::string name;
    std::string host_ref;
    std::string ip;
    std::string mac;
    std::string subnet;
    int business_criticality_level = 1;
    std::vector<ComponentNode> components;
    std::vector<DependencyEdge> intra_edges;
    std::vector<VulnerabilityRecord> vulnerabilities;
};

struct Host {
    std::string id;
    std::vector<std::string> assets;
};

struct RiskParams {
    double alpha = 0.3;
    double beta = 0.4;
    double gamma_exploit = 0.3;
    double delta = 0.5;
    double theta = 0.5;
    double sigma = 0.5;
    double sev_critical = 1.0;
    double sev_high = 0.75;
    double sev_medium = 0.5;
    double sev_low = 0.25;
    double w1 = 0.6;
    double w2 = 0.4;
    double criticality_threshold = 0.4;
    double pagerank_damping = 0.85;
    bool dedup_paths = false;
};

struct SystemModel {
    std::vector<Host> hosts;
    std::vector<Asset> assets;
    std::vector<DependencyEdge> cross_asset_edges;
    std::vector<CommunicationEdge> communication_edges;
    std::vector<std::string> waypoints;
    std::vector<std::string> entry_points;
    std::map<std::string, double> criticality_overrides;
    RiskParams params;

    const Asset* find_asset(const std::string& id) const;
    const Host* find_host(const std::string& id) const;
    // Component lookup; also reports the owning asset.
    const ComponentNode* find_component(const std::string& id, const Asset** owner = nullptr) const;
    // Vulnerability records attached to one component, in declaration order.
    std::vector<const VulnerabilityRecord*> component_vulns(const Asset& asset,
                                                            const std::string& component_id) const;
};

// Loads and fully validates an inventory document. A file can pull in a base
// document via a top-level "include" (path relative to the including file);
// keys present in the including file replace the included ones wholesale.
SystemModel load_system_model(const std::string& path);

// Parses an inventory from already-loaded JSON. base_dir anchors includes.
SystemModel parse_system_model(const nlohmann::json& doc, const std::string& base_dir);

// Runs every model invariant; throws ValidationError naming the first
// violation. load_system_model calls this; it is public so synthetic models
// can be checked too.
void validate_model(const SystemModel& model);

// Returns soft warnings (weight groups that do not sum to 1). Hard
// violations (negative weights, sigma outside [0,1], damping outside (0,1))
// throw a ValidationError listing every offending field.
std::vector<std::string> validate_params(const RiskParams& p);

// Applies overrides from a JSON object ({"alpha": 0.2, ...}) on top of base.
// Unknown keys are rejected.
RiskParams params_from_json(const nlohmann::json& overrides, RiskParams base);

// Serializes back to the inventory schema. Loading the result yields a model
// semantically identical to the input.
nlohmann::ordered_json serialize(const SystemModel& model);

}  // namespace vulrg
