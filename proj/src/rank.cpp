#include "vulrg/rank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace vulrg {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// Sort order for patch entries: biggest reduction first, then higher exploit
// likelihood, then higher impact, then the "cve@asset" key as a plain string.
bool entry_before(const PatchEntry& a, const PatchEntry& b) {
    if (a.reduction != b.reduction) return a.reduction > b.reduction;
    if (a.exploit_likelihood != b.exploit_likelihood)
        return a.exploit_likelihood > b.exploit_likelihood;
    if (a.impact != b.impact) return a.impact > b.impact;
    return a.cve_id + "@" + a.asset_id < b.cve_id + "@" + b.asset_id;
}

// Dense ranks: entries whose reduction is identical share a rank.
void assign_ranks(std::vector<PatchEntry>& entries) {
    int rank = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (i == 0 || entries[i].reduction != entries[i - 1].reduction) ++rank;
        entries[i].rank = rank;
    }
}

const VulnerabilityRecord& record_of(const SystemModel& model, const std::string& asset_id,
                                     const std::string& cve_id) {
    const Asset* a = model.find_asset(asset_id);
    if (a)
        for (const auto& v : a->vulnerabilities)
            if (v.cve_id == cve_id) return v;
    throw ValidationError("unknown patch pair '" + cve_id + "@" + asset_id + "'");
}

PatchRanking rank_system(const SystemModel& model, const RiskParams& p) {
    RiskReport r = system_risk(model, p);
    PatchRanking out;
    out.scope = "system";
    for (const auto& v : r.vulnerabilities) {
        const VulnerabilityRecord& rec = record_of(model, v.asset_id, v.cve_id);
        const AssetReport* ar = r.asset(v.asset_id);
        double host_part = ar->criticality.score * v.total;
        double net_part = 0.0;
        bool network_class = classify_vulnerability(rec) == RiskClass::NetworkBased;
        const ComponentReport* cr = r.component(v.component_id);
        if (network_class && ar->path_count > 0)
            net_part = ar->path_count * v.exploit_likelihood * rec.impact_subscore *
                       cr->system_centrality;
        PatchEntry e;
        e.cve_id = v.cve_id;
        e.component_id = v.component_id;
        e.asset_id = v.asset_id;
        e.exploit_likelihood = v.exploit_likelihood;
        e.impact = rec.impact_subscore;
        e.reduction = host_part + net_part;
        e.risk_before = r.system;
        e.risk_after = r.system - e.reduction;
        e.explanation.push_back("host-based share " + fmt(host_part) + " = criticality " +
                                fmt(ar->criticality.score) + " * vulnerability total " +
                                fmt(v.total));
        if (net_part > 0.0) {
            e.explanation.push_back("network share " + fmt(net_part) + " across " +
                                    std::to_string(ar->path_count) + " attack path(s)");
        } else if (!network_class) {
            e.explanation.push_back(std::string("no network share: attack vector ") +
                                    to_string(rec.attack_vector));
        } else {
            e.explanation.push_back("no network share: asset is on no retained attack path");
        }
        out.entries.push_back(std::move(e));
    }
    std::sort(out.entries.begin(), out.entries.end(), entry_before);
    assign_ranks(out.entries);
    return out;
}

PatchRanking rank_asset(const SystemModel& model, const RiskParams& p,
                        const std::string& asset_id) {
    if (!model.find_asset(asset_id))
        throw ValidationError("unknown asset '" + asset_id + "'");
    RiskReport r = system_risk(model, p);
    double before = r.asset(asset_id)->risk;
    PatchRanking out;
    out.scope = "asset:" + asset_id;
    for (const auto& v : r.vulnerabilities) {
        if (v.asset_id != asset_id) continue;
        const VulnerabilityRecord& rec = record_of(model, v.asset_id, v.cve_id);
        PatchEntry e;
        e.cve_id = v.cve_id;
        e.component_id = v.component_id;
        e.asset_id = v.asset_id;
        e.exploit_likelihood = v.exploit_likelihood;
        e.impact = rec.impact_subscore;
        e.reduction = v.total;
        e.risk_before = before;
        e.risk_after = before - v.total;
        e.explanation.push_back("removes direct " + fmt(v.direct) + " + indirect " +
                                fmt(v.indirect) + " from asset '" + asset_id + "'");
        out.entries.push_back(std::move(e));
    }
    std::sort(out.entries.begin(), out.entries.end(), entry_before);
    assign_ranks(out.entries);
    return out;
}

PatchRanking rank_component(const SystemModel& model, const RiskParams& p,
                            const std::string& component_id) {
    const Asset* owner = nullptr;
    const ComponentNode* comp = model.find_component(component_id, &owner);
    if (!comp) throw ValidationError("unknown component '" + component_id + "'");
    CentralityScores scores = centrality(build_dependence_graph(model, owner->id), p);
    double cent = scores.normalized_of(component_id);
    double before = cvs(*owner, component_id, p) * cent;
    PatchRanking out;
    out.scope = "component:" + component_id;
    for (const auto& v : owner->vulnerabilities) {
        if (v.component_ref != component_id) continue;
        Asset patched = *owner;
        patched.vulnerabilities.erase(
            std::remove_if(patched.vulnerabilities.begin(), patched.vulnerabilities.end(),
                           [&](const VulnerabilityRecord& w) { return w.cve_id == v.cve_id; }),
            patched.vulnerabilities.end());
        double after = cvs(patched, component_id, p) * cent;
        PatchEntry e;
        e.cve_id = v.cve_id;
        e.component_id = component_id;
        e.asset_id = owner->id;
        e.exploit_likelihood = exploit_likelihood(v, p);
        e.impact = v.impact_subscore;
        e.risk_before = before;
        e.risk_after = after;
        e.reduction = before - after;
        e.explanation.push_back("severity contribution " + fmt(before - after) +
                                " at component centrality " + fmt(cent));
        out.entries.push_back(std::move(e));
    }
    std::sort(out.entries.begin(), out.entries.end(), entry_before);
    assign_ranks(out.entries);
    return out;
}

}  // namespace

PatchRanking rank_patches(const SystemModel& model, const RiskParams& p,
                          const std::string& scope) {
    if (scope == "system") return rank_system(model, p);
    if (scope.rfind("asset:", 0) == 0) return rank_asset(model, p, scope.substr(6));
    if (scope.rfind("component:", 0) == 0) return rank_component(model, p, scope.substr(10));
    throw ValidationError("unknown ranking scope '" + scope +
                          "' (expected system, asset:<id> or component:<id>)");
}

WhatIfResult what_if(const SystemModel& model, const RiskParams& p,
                     const std::vector<std::pair<std::string, std::string>>& patches) {
    // Validate and dedup the patch set up front so errors name the bad pair.
    std::set<std::pair<std::string, std::string>> uniq;
    for (const auto& [asset_id, cve_id] : patches) {
        record_of(model, asset_id, cve_id);
        uniq.insert({asset_id, cve_id});
    }

    RiskReport before = system_risk(model, p);

    SystemModel patched = model;
    for (auto& a : patched.assets) {
        a.vulnerabilities.erase(
            std::remove_if(a.vulnerabilities.begin(), a.vulnerabilities.end(),
                           [&](const VulnerabilityRecord& v) {
                               return uniq.count({a.id, v.cve_id}) > 0;
                           }),
            a.vulnerabilities.end());
        std::set<std::string> kept;
        for (const auto& v : a.vulnerabilities) kept.insert(v.cve_id);
        for (auto& c : a.components) {
            c.vulnerabilities.erase(
                std::remove_if(c.vulnerabilities.begin(), c.vulnerabilities.end(),
                               [&](const std::string& id) { return kept.count(id) == 0; }),
                c.vulnerabilities.end());
        }
    }
    RiskReport after = system_risk(patched, p);

    WhatIfResult out;
    out.patched.assign(uniq.begin(), uniq.end());
    auto level = [](double b, double a) { return WhatIfLevel{b, a, a - b}; };
    out.system = level(before.system, after.system);
    out.network = level(before.network, after.network);
    out.host_total = level(before.host_total, after.host_total);
    for (const auto& [hid, hb] : before.host_risk) out.hosts[hid] = level(hb, after.host_risk.at(hid));
    for (const auto& a : before.assets) {
        double b = a.risk;
        double aa = after.asset(a.id)->risk;
        if (std::abs(b - aa) > 1e-12) out.assets[a.id] = level(b, aa);
    }
    return out;
}

std::vector<FactorEntry> component_factor_rank(const SystemModel& model,
                                               const std::string& component_id,
                                               const RiskParams& p) {
    const Asset* owner = nullptr;
    if (!model.find_component(component_id, &owner))
        throw ValidationError("unknown component '" + component_id + "'");
    std::vector<FactorEntry> out;
    for (const auto& v : owner->vulnerabilities) {
        if (v.component_ref != component_id) continue;
        FactorEntry e;
        e.cve_id = v.cve_id;
        e.exploit_likelihood = exploit_likelihood(v, p);
        e.propagation_likelihood = propagation_likelihood(v, p);
        e.impact = v.impact_subscore;
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const FactorEntry& a, const FactorEntry& b) {
        double pa = a.exploit_likelihood * a.impact;
        double pb = b.exploit_likelihood * b.impact;
        if (pa != pb) return pa > pb;
        if (a.propagation_likelihood != b.propagation_likelihood)
            return a.propagation_likelihood > b.propagation_likelihood;
        return a.cve_id < b.cve_id;
    });
    int rank = 0;
    for (size_t i = 0; i < out.size(); ++i) {
        bool tie = i > 0 &&
                   out[i].exploit_likelihood * out[i].impact ==
                       out[i - 1].exploit_likelihood * out[i - 1].impact &&
                   out[i].propagation_likelihood == out[i - 1].propagation_likelihood;
        if (!tie) ++rank;
        out[i].rank = rank;
    }
    return out;
}

}  // namespace vulrg
