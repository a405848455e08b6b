#include "vulrg/model.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace vulrg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(AttackVector av) {
    switch (av) {
        case AttackVector::Network: return "Network";
        case AttackVector::Adjacent: return "Adjacent";
        case AttackVector::Local: return "Local";
        case AttackVector::Physical: return "Physical";
    }
    return "Network";
}

const char* to_string(Part part) {
    switch (part) {
        case Part::Application: return "application";
        case Part::Os: return "os";
        case Part::Hardware: return "hardware";
    }
    return "application";
}

const char* to_string(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::ER: return "ER";
        case EdgeKind::IR: return "IR";
        case EdgeKind::DR: return "DR";
        case EdgeKind::SR: return "SR";
        case EdgeKind::SCR: return "SCR";
        case EdgeKind::NR: return "NR";
    }
    return "ER";
}

AttackVector attack_vector_from(const std::string& s) {
    if (s == "Network") return AttackVector::Network;
    if (s == "Adjacent") return AttackVector::Adjacent;
    if (s == "Local") return AttackVector::Local;
    if (s == "Physical") return AttackVector::Physical;
    throw ValidationError("unknown attack_vector '" + s + "'");
}

Part part_from(const std::string& s) {
    if (s == "application") return Part::Application;
    if (s == "os") return Part::Os;
    if (s == "hardware") return Part::Hardware;
    throw ValidationError("unknown component part '" + s + "'");
}

EdgeKind edge_kind_from(const std::string& s) {
    if (s == "ER") return EdgeKind::ER;
    if (s == "IR") return EdgeKind::IR;
    if (s == "DR") return EdgeKind::DR;
    if (s == "SR") return EdgeKind::SR;
    if (s == "SCR") return EdgeKind::SCR;
    if (s == "NR") return EdgeKind::NR;
    throw ValidationError("unknown dependency kind '" + s + "'");
}

double kind_default_weight(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::ER:
        case EdgeKind::NR:
            return 2.0;
        default:
            return 1.0;
    }
}

const Asset* SystemModel::find_asset(const std::string& id) const {
    for (const auto& a : assets)
        if (a.id == id) return &a;
    return nullptr;
}

const Host* SystemModel::find_host(const std::string& id) const {
    for (const auto& h : hosts)
        if (h.id == id) return &h;
    return nullptr;
}

const ComponentNode* SystemModel::find_component(const std::string& id, const Asset** owner) const {
    for (const auto& a : assets) {
        for (const auto& c : a.components) {
            if (c.id == id) {
                if (owner) *owner = &a;
                return &c;
            }
        }
    }
    return nullptr;
}

std::vector<const VulnerabilityRecord*> SystemModel::component_vulns(
    const Asset& asset, const std::string& component_id) const {
    std::vector<const VulnerabilityRecord*> out;
    for (const auto& v : asset.vulnerabilities)
        if (v.component_ref == component_id) out.push_back(&v);
    return out;
}

namespace {

std::string type_name(const json& j) {
    return std::string(j.type_name());
}

const json& need(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ValidationError(ctx + ": missing required key '" + key + "'");
    return *it;
}

std::string need_string(const json& obj, const char* key, const std::string& ctx) {
    const json& v = need(obj, key, ctx);
    if (!v.is_string())
        throw ValidationError(ctx + ": key '" + key + "' must be a string, got " + type_name(v));
    return v.get<std::string>();
}

double need_number(const json& obj, const char* key, const std::string& ctx) {
    const json& v = need(obj, key, ctx);
    if (!v.is_number())
        throw ValidationError(ctx + ": key '" + key + "' must be a number, got " + type_name(v));
    return v.get<double>();
}

bool need_bool(const json& obj, const char* key, const std::string& ctx) {
    const json& v = need(obj, key, ctx);
    if (!v.is_boolean())
        throw ValidationError(ctx + ": key '" + key + "' must be a boolean, got " + type_name(v));
    return v.get<bool>();
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed inventory '" + path + "': " + e.what());
    }
}

// Resolves the include chain bottom-up: the including document's top-level
// keys replace the included ones.
json load_document(const std::string& path, std::set<std::string>& visiting) {
    std::string canon;
    std::error_code ec;
    canon = fs::weakly_canonical(fs::path(path), ec).string();
    if (ec) canon = path;
    if (!visiting.insert(canon).second)
        throw ValidationError("include cycle through '" + path + "'");

    json doc = read_json_file(path);
    if (!doc.is_object())
        throw ValidationError("inventory '" + path + "' must be a JSON object");
    if (doc.contains("include")) {
        const json& inc = doc.at("include");
        if (!inc.is_string())
            throw ValidationError("inventory '" + path + "': 'include' must be a string path");
        fs::path base = fs::path(path).parent_path() / inc.get<std::string>();
        json merged = load_document(base.string(), visiting);
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            if (it.key() == "include") continue;
            merged[it.key()] = it.value();
        }
        visiting.erase(canon);
        return merged;
    }
    visiting.erase(canon);
    return doc;
}

DependencyEdge parse_dep_edge(const json& j, const std::string& ctx) {
    DependencyEdge e;
    e.from = need_string(j, "from", ctx);
    e.to = need_string(j, "to", ctx);
    e.kind = edge_kind_from(need_string(j, "kind", ctx + " " + e.from + "->" + e.to));
    e.weight = j.contains("weight") ? need_number(j, "weight", ctx) : kind_default_weight(e.kind);
    return e;
}

VulnerabilityRecord parse_vuln(const json& j, const std::string& ctx) {
    VulnerabilityRecord v;
    v.cve_id = need_string(j, "cve_id", ctx);
    std::string vc = ctx + " vulnerability '" + v.cve_id + "'";
    if (j.contains("cvss_version")) {
        std::string ver = need_string(j, "cvss_version", vc);
        if (!ver.empty() && ver[0] == '2')
            throw ValidationError(vc + ": CVSS v2-only records are not supported");
    }
    v.component_ref = need_string(j, "component_ref", vc);
    v.cvss_base = need_number(j, "cvss_base", vc);
    v.likelihood_subscore = need_number(j, "likelihood_subscore", vc);
    v.impact_subscore = need_number(j, "impact_subscore", vc);
    v.epss = need_number(j, "epss", vc);
    v.exploit_exists = need_bool(j, "exploit_exists", vc);
    v.scope_change = need_bool(j, "scope_change", vc);
    v.ransomware = need_bool(j, "ransomware", vc);
    v.attack_vector = attack_vector_from(need_string(j, "attack_vector", vc));
    return v;
}

}  // namespace

RiskParams params_from_json(const json& overrides, RiskParams base) {
    if (!overrides.is_object())
        throw ValidationError("params must be a JSON object");
    for (auto it = overrides.begin(); it != overrides.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        auto num = [&]() -> double {
            if (!v.is_number())
                throw ValidationError("param '" + k + "' must be a number");
            return v.get<double>();
        };
        if (k == "alpha") base.alpha = num();
        else if (k == "beta") base.beta = num();
        else if (k == "gamma_exploit") base.gamma_exploit = num();
        else if (k == "delta") base.delta = num();
        else if (k == "theta") base.theta = num();
        else if (k == "sigma") base.sigma = num();
        else if (k == "w1") base.w1 = num();
        else if (k == "w2") base.w2 = num();
        else if (k == "criticality_threshold") base.criticality_threshold = num();
        else if (k == "pagerank_damping") base.pagerank_damping = num();
        else if (k == "dedup_paths") {
            if (!v.is_boolean())
                throw ValidationError("param 'dedup_paths' must be a boolean");
            base.dedup_paths = v.get<bool>();
        } else if (k == "severity_weights") {
            if (!v.is_object())
                throw ValidationError("param 'severity_weights' must be an object");
            for (auto sit = v.begin(); sit != v.end(); ++sit) {
                if (!sit.value().is_number())
                    throw ValidationError("severity weight '" + sit.key() + "' must be a number");
                double w = sit.value().get<double>();
                if (sit.key() == "Critical") base.sev_critical = w;
                else if (sit.key() == "High") base.sev_high = w;
                else if (sit.key() == "Medium") base.sev_medium = w;
                else if (sit.key() == "Low") base.sev_low = w;
                else throw ValidationError("unknown severity bucket '" + sit.key() + "'");
            }
        } else {
            throw ValidationError("unknown param '" + k + "'");
        }
    }
    return base;
}

SystemModel parse_system_model(const json& doc, const std::string&) {
    if (!doc.is_object())
        throw ValidationError("inventory must be a JSON object");
    std::string schema = doc.contains("schema") ? need_string(doc, "schema", "inventory") : "";
    if (schema != "vulrg-inventory/1")
        throw ValidationError("unsupported inventory schema '" + schema + "'");

    SystemModel m;
    if (doc.contains("params"))
        m.params = params_from_json(doc.at("params"), RiskParams{});

    for (const auto& hj : doc.value("hosts", json::array())) {
        Host h;
        h.id = need_string(hj, "id", "host");
        const json& aj = need(hj, "assets", "host '" + h.id + "'");
        if (!aj.is_array())
            throw ValidationError("host '" + h.id + "': assets must be an array");
        for (const auto& a : aj) h.assets.push_back(a.get<std::string>());
        m.hosts.push_back(std::move(h));
    }

    for (const auto& aj : doc.value("assets", json::array())) {
        Asset a;
        a.id = need_string(aj, "id", "asset");
        std::string ctx = "asset '" + a.id + "'";
        a.name = need_string(aj, "name", ctx);
        a.host_ref = need_string(aj, "host_ref", ctx);
        a.ip = aj.value("ip", "");
        a.mac = aj.value("mac", "");
        a.subnet = aj.value("subnet", "");
        const json& lvl = need(aj, "business_criticality_level", ctx);
        if (!lvl.is_number_integer())
            throw ValidationError(ctx + ": business_criticality_level must be an integer");
        a.business_criticality_level = lvl.get<int>();
        for (const auto& cj : aj.value("components", json::array())) {
            ComponentNode c;
            c.id = need_string(cj, "id", ctx + " component");
            std::string cctx = ctx + " component '" + c.id + "'";
            c.vendor = need_string(cj, "vendor", cctx);
            c.product = need_string(cj, "product", cctx);
            c.version = need_string(cj, "version", cctx);
            c.part = part_from(need_string(cj, "part", cctx));
            if (cj.contains("cpe")) c.cpe = need_string(cj, "cpe", cctx);
            for (const auto& vid : cj.value("vulnerabilities", json::array()))
                c.vulnerabilities.push_back(vid.get<std::string>());
            a.components.push_back(std::move(c));
        }
        for (const auto& ej : aj.value("intra_edges", json::array()))
            a.intra_edges.push_back(parse_dep_edge(ej, ctx + " intra edge"));
        for (const auto& vj : aj.value("vulnerabilities", json::array()))
            a.vulnerabilities.push_back(parse_vuln(vj, ctx));
        m.assets.push_back(std::move(a));
    }

    for (const auto& ej : doc.value("cross_asset_edges", json::array()))
        m.cross_asset_edges.push_back(parse_dep_edge(ej, "cross edge"));

    for (const auto& cj : doc.value("communication_edges", json::array())) {
        CommunicationEdge e;
        e.a = need_string(cj, "a", "communication edge");
        e.b = need_string(cj, "b", "communication edge");
        e.weight = cj.contains("weight") ? need_number(cj, "weight", "communication edge") : 1.0;
        m.communication_edges.push_back(std::move(e));
    }

    for (const auto& w : doc.value("waypoints", json::array()))
        m.waypoints.push_back(w.get<std::string>());
    for (const auto& e : doc.value("entry_points", json::array()))
        m.entry_points.push_back(e.get<std::string>());
    if (doc.contains("criticality_overrides")) {
        const json& ov = doc.at("criticality_overrides");
        if (!ov.is_object())
            throw ValidationError("criticality_overrides must be an object");
        for (auto it = ov.begin(); it != ov.end(); ++it) {
            if (!it.value().is_number())
                throw ValidationError("criticality override for '" + it.key() + "' must be a number");
            m.criticality_overrides[it.key()] = it.value().get<double>();
        }
    }

    // Keep each component's cve list in sync with the asset's records.
    for (auto& a : m.assets) {
        for (auto& c : a.components) {
            std::vector<std::string> given = c.vulnerabilities;
            c.vulnerabilities.clear();
            for (const auto& v : a.vulnerabilities)
                if (v.component_ref == c.id) c.vulnerabilities.push_back(v.cve_id);
            if (!given.empty() && given != c.vulnerabilities)
                throw ValidationError("component '" + c.id +
                                      "': declared vulnerability list disagrees with the records");
        }
    }

    validate_model(m);
    return m;
}

SystemModel load_system_model(const std::string& path) {
    std::set<std::string> visiting;
    json doc = load_document(path, visiting);
    return parse_system_model(doc, fs::path(path).parent_path().string());
}

void validate_model(const SystemModel& m) {
    if (m.assets.empty())
        throw ValidationError("no assets");

    std::set<std::string> host_ids, asset_ids, comp_ids;
    for (const auto& h : m.hosts)
        if (!host_ids.insert(h.id).second)
            throw ValidationError("duplicate host id '" + h.id + "'");
    for (const auto& a : m.assets) {
        if (!asset_ids.insert(a.id).second)
            throw ValidationError("duplicate asset id '" + a.id + "'");
        if (a.business_criticality_level < 1 || a.business_criticality_level > 6)
            throw ValidationError("asset '" + a.id + "': business_criticality_level " +
                                  std::to_string(a.business_criticality_level) +
                                  " outside [1,6]");
        if (a.components.empty())
            throw ValidationError("asset '" + a.id + "' has no components");
        for (const auto& c : a.components)
            if (!comp_ids.insert(c.id).second)
                throw ValidationError("duplicate component id '" + c.id + "'");
    }

    // Host membership: every asset in exactly one host, matching host_ref.
    std::map<std::string, std::string> owner;
    for (const auto& h : m.hosts) {
        for (const auto& aid : h.assets) {
            if (!asset_ids.count(aid))
                throw ValidationError("host '" + h.id + "' references unknown asset '" + aid + "'");
            if (!owner.emplace(aid, h.id).second)
                throw ValidationError("asset '" + aid + "' appears in more than one host");
        }
    }
    for (const auto& a : m.assets) {
        auto it = owner.find(a.id);
        if (it == owner.end())
            throw ValidationError("asset '" + a.id + "' belongs to no host");
        if (!m.find_host(a.host_ref))
            throw ValidationError("asset '" + a.id + "': unknown host_ref '" + a.host_ref + "'");
        if (it->second != a.host_ref)
            throw ValidationError("asset '" + a.id + "': host_ref '" + a.host_ref +
                                  "' disagrees with host '" + it->second + "' membership");
    }

    for (const auto& w : m.waypoints) {
        if (asset_ids.count(w) || comp_ids.count(w))
            throw ValidationError("waypoint '" + w + "' collides with an asset or component id");
    }

    // Which asset owns each component, for cross-edge checks.
    std::map<std::string, std::string> comp_owner;
    for (const auto& a : m.assets)
        for (const auto& c : a.components) comp_owner[c.id] = a.id;

    std::set<std::pair<std::string, std::string>> dep_pairs;
    auto check_dep = [&](const DependencyEdge& e, const std::string& where) {
        if (e.weight <= 0)
            throw ValidationError(where + " " + e.from + "->" + e.to + ": weight must be positive");
        if (e.from == e.to)
            throw ValidationError(where + " '" + e.from + "': self-dependency");
        if (!dep_pairs.insert({e.from, e.to}).second)
            throw ValidationError("duplicate dependency edge " + e.from + "->" + e.to);
    };

    for (const auto& a : m.assets) {
        std::set<std::string> own;
        for (const auto& c : a.components) own.insert(c.id);
        for (const auto& e : a.intra_edges) {
            check_dep(e, "asset '" + a.id + "' intra edge");
            if (e.kind == EdgeKind::NR)
                throw ValidationError("intra edge " + e.from + "->" + e.to +
                                      ": NR edges connect assets, not components");
            if (!own.count(e.from))
                throw ValidationError("asset '" + a.id + "' intra edge references unknown component '" +
                                      e.from + "'");
            if (!own.count(e.to))
                throw ValidationError("asset '" + a.id + "' intra edge references unknown component '" +
                                      e.to + "'");
        }
        std::set<std::string> cves;
        for (const auto& v : a.vulnerabilities) {
            std::string vc = "vulnerability '" + v.cve_id + "' on asset '" + a.id + "'";
            if (v.cve_id.empty())
                throw ValidationError("asset '" + a.id + "': vulnerability with empty cve_id");
            if (!cves.insert(v.cve_id).second)
                throw ValidationError(vc + ": duplicate cve_id within the asset");
            if (!own.count(v.component_ref))
                throw ValidationError(vc + ": unknown component_ref '" + v.component_ref + "'");
            auto in01 = [&](double x) { return x >= 0.0 && x <= 1.0; };
            auto in010 = [&](double x) { return x >= 0.0 && x <= 10.0; };
            if (!in010(v.cvss_base)) throw ValidationError(vc + ": cvss_base outside [0,10]");
            if (!in010(v.likelihood_subscore))
                throw ValidationError(vc + ": likelihood_subscore outside [0,10]");
            if (!in010(v.impact_subscore))
                throw ValidationError(vc + ": impact_subscore outside [0,10]");
            if (!in01(v.epss)) throw ValidationError(vc + ": epss outside [0,1]");
        }
    }

    for (const auto& e : m.cross_asset_edges) {
        check_dep(e, "cross edge");
        if (e.kind == EdgeKind::NR) {
            if (!asset_ids.count(e.from))
                throw ValidationError("NR edge references unknown asset '" + e.from + "'");
            if (!asset_ids.count(e.to))
                throw ValidationError("NR edge references unknown asset '" + e.to + "'");
        } else {
            auto f = comp_owner.find(e.from);
            auto t = comp_owner.find(e.to);
            if (f == comp_owner.end())
                throw ValidationError("cross edge references unknown component '" + e.from + "'");
            if (t == comp_owner.end())
                throw ValidationError("cross edge references unknown component '" + e.to + "'");
            if (f->second == t->second)
                throw ValidationError("cross edge " + e.from + "->" + e.to +
                                      " stays inside asset '" + f->second +
                                      "'; declare it as an intra edge");
        }
    }

    std::set<std::string> comm_nodes(asset_ids.begin(), asset_ids.end());
    comm_nodes.insert(m.waypoints.begin(), m.waypoints.end());
    for (const auto& e : m.communication_edges) {
        if (e.a == e.b)
            throw ValidationError("communication edge '" + e.a + "': self-loop");
        if (e.weight <= 0)
            throw ValidationError("communication edge " + e.a + "-" + e.b +
                                  ": weight must be positive");
        if (!comm_nodes.count(e.a))
            throw ValidationError("communication edge references unknown node '" + e.a + "'");
        if (!comm_nodes.count(e.b))
            throw ValidationError("communication edge references unknown node '" + e.b + "'");
    }

    for (const auto& e : m.entry_points)
        if (!comm_nodes.count(e))
            throw ValidationError("entry point '" + e + "' is not an asset or waypoint");

    for (const auto& [aid, score] : m.criticality_overrides) {
        if (!asset_ids.count(aid))
            throw ValidationError("criticality override for unknown asset '" + aid + "'");
        if (score < 0.0 || score > 1.0)
            throw ValidationError("criticality override for '" + aid + "' outside [0,1]");
    }

    validate_params(m.params);
}

std::vector<std::string> validate_params(const RiskParams& p) {
    std::vector<std::string> hard;
    auto nonneg = [&](double v, const char* name) {
        if (v < 0.0) hard.push_back(std::string(name) + " is negative");
    };
    nonneg(p.alpha, "alpha");
    nonneg(p.beta, "beta");
    nonneg(p.gamma_exploit, "gamma_exploit");
    nonneg(p.delta, "delta");
    nonneg(p.theta, "theta");
    nonneg(p.w1, "w1");
    nonneg(p.w2, "w2");
    nonneg(p.sev_critical, "severity weight Critical");
    nonneg(p.sev_high, "severity weight High");
    nonneg(p.sev_medium, "severity weight Medium");
    nonneg(p.sev_low, "severity weight Low");
    nonneg(p.criticality_threshold, "criticality_threshold");
    if (p.sigma < 0.0 || p.sigma > 1.0) hard.push_back("sigma outside [0,1]");
    if (p.pagerank_damping <= 0.0 || p.pagerank_damping >= 1.0)
        hard.push_back("pagerank_damping outside (0,1)");
    if (!hard.empty()) {
        std::string msg = "invalid parameters:";
        for (const auto& h : hard) msg += " " + h + ";";
        msg.pop_back();
        throw ValidationError(msg);
    }

    std::vector<std::string> warnings;
    auto fmt = [](double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    double lw = p.alpha + p.beta + p.gamma_exploit;
    if (std::abs(lw - 1.0) > 1e-9)
        warnings.push_back("likelihood weights sum to " + fmt(lw));
    double pw = p.delta + p.theta;
    if (std::abs(pw - 1.0) > 1e-9)
        warnings.push_back("propagation weights sum to " + fmt(pw));
    return warnings;
}

namespace {

ordered_json dep_edge_json(const DependencyEdge& e) {
    ordered_json j;
    j["from"] = e.from;
    j["to"] = e.to;
    j["kind"] = to_string(e.kind);
    j["weight"] = e.weight;
    return j;
}

ordered_json params_json(const RiskParams& p) {
    ordered_json j;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["gamma_exploit"] = p.gamma_exploit;
    j["delta"] = p.delta;
    j["theta"] = p.theta;
    j["sigma"] = p.sigma;
    j["severity_weights"] = {{"Critical", p.sev_critical},
                             {"High", p.sev_high},
                             {"Medium", p.sev_medium},
                             {"Low", p.sev_low}};
    j["w1"] = p.w1;
    j["w2"] = p.w2;
    j["criticality_threshold"] = p.criticality_threshold;
    j["pagerank_damping"] = p.pagerank_damping;
    j["dedup_paths"] = p.dedup_paths;
    return j;
}

}  // namespace

ordered_json serialize(const SystemModel& m) {
    ordered_json doc;
    doc["schema"] = "vulrg-inventory/1";
    doc["params"] = params_json(m.params);
    doc["hosts"] = ordered_json::array();
    for (const auto& h : m.hosts)
        doc["hosts"].push_back({{"id", h.id}, {"assets", h.assets}});
    doc["assets"] = ordered_json::array();
    for (const auto& a : m.assets) {
        ordered_json aj;
        aj["id"] = a.id;
        aj["name"] = a.name;
        aj["host_ref"] = a.host_ref;
        aj["ip"] = a.ip;
        aj["mac"] = a.mac;
        aj["subnet"] = a.subnet;
        aj["business_criticality_level"] = a.business_criticality_level;
        aj["components"] = ordered_json::array();
        for (const auto& c : a.components) {
            ordered_json cj;
            cj["id"] = c.id;
            cj["vendor"] = c.vendor;
            cj["product"] = c.product;
            cj["version"] = c.version;
            cj["part"] = to_string(c.part);
            if (c.cpe) cj["cpe"] = *c.cpe;
            aj["components"].push_back(std::move(cj));
        }
        aj["intra_edges"] = ordered_json::array();
        for (const auto& e : a.intra_edges) aj["intra_edges"].push_back(dep_edge_json(e));
        aj["vulnerabilities"] = ordered_json::array();
        for (const auto& v : a.vulnerabilities) {
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
            aj["vulnerabilities"].push_back(std::move(vj));
        }
        doc["assets"].push_back(std::move(aj));
    }
    doc["cross_asset_edges"] = ordered_json::array();
    for (const auto& e : m.cross_asset_edges) doc["cross_asset_edges"].push_back(dep_edge_json(e));
    doc["communication_edges"] = ordered_json::array();
    for (const auto& e : m.communication_edges)
        doc["communication_edges"].push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
    doc["waypoints"] = m.waypoints;
    doc["entry_points"] = m.entry_points;
    doc["criticality_overrides"] = ordered_json::object();
    for (const auto& [k, v] : m.criticality_overrides) doc["criticality_overrides"][k] = v;
    return doc;
}

}  // namespace vulrg
