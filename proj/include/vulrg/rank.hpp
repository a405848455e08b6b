#pragma once

#include <map>
#include <string>
#include <vector>

#include "vulrg/model.hpp"
#include "vulrg/risk.hpp"

namespace vulrg {

struct PatchEntry {
    int rank = 0;
    std::string cve_id;
    std::string component_id;
    std::string asset_id;
    double risk_before = 0.0;
    double risk_after = 0.0;
    double reduction = 0.0;
    double exploit_likelihood = 0.0;
    double impact = 0.0;
    std::vector<std::string> explanation;
};

struct PatchRanking {
    std::string scope;  // "system", "asset:<id>" or "component:<id>"
    std::vector<PatchEntry> entries;  // reduction descending, ranks 1..n
};

struct WhatIfLevel {
    double before = 0.0;
    double after = 0.0;
    double delta = 0.0;
};

struct WhatIfResult {
    std::vector<std::pair<std::string, std::string>> patched;  // (asset, cve)
    WhatIfLevel system;
    WhatIfLevel network;
    WhatIfLevel host_total;
    std::map<std::string, WhatIfLevel> hosts;
    std::map<std::string, WhatIfLevel> assets;  // only assets whose risk moved
};

struct FactorEntry {
    int rank = 0;
    std::string cve_id;
    double exploit_likelihood = 0.0;
    double propagation_likelihood = 0.0;
    double impact = 0.0;
};

// Ranks every candidate single-CVE patch within the scope by the aggregate
// risk it removes. Centralities, criticalities and attack paths stay at
// their pre-patch values: a patch removes a vulnerability, not a component,
// so the structural scores are unchanged by construction. Ties break by
// higher exploit likelihood, then higher impact, then CVE id, then asset id.
PatchRanking rank_patches(const SystemModel& model, const RiskParams& p, const std::string& scope);

// Removes the whole patch set and re-evaluates every level from scratch.
// Unknown (asset, cve) pairs throw a ValidationError naming the pair.
WhatIfResult what_if(const SystemModel& model, const RiskParams& p,
                     const std::vector<std::pair<std::string, std::string>>& patches);

// Orders one component's CVEs by EL * impact descending, with propagation
// likelihood and then CVE id as tie-breaks.
std::vector<FactorEntry> component_factor_rank(const SystemModel& model,
                                               const std::string& component_id,
                                               const RiskParams& p);

}  // namespace vulrg
