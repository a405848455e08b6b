#include "vulrg/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vulrg/enrich.hpp"
#include "vulrg/model.hpp"
#include "vulrg/rank.hpp"
#include "vulrg/risk.hpp"

namespace vulrg::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string num(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<size_t> width;
    for (const auto& r : rows) {
        if (width.size() < r.size()) width.resize(r.size(), 0);
        for (size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    for (const auto& r : rows) {
        std::string line;
        for (size_t i = 0; i < r.size(); ++i) {
            line += r[i];
            if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
        }
        out << line << "\n";
    }
}

void print_csv(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) {
            if (i) out << ",";
            out << r[i];
        }
        out << "\n";
    }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

const VulnerabilityRecord* lookup_record(const SystemModel& model, const std::string& asset_id,
                                         const std::string& cve_id) {
    const Asset* a = model.find_asset(asset_id);
    if (!a) return nullptr;
    for (const auto& v : a->vulnerabilities)
        if (v.cve_id == cve_id) return &v;
    return nullptr;
}

struct Scope {
    std::string kind;  // system, network, host, asset, component
    std::string id;
};

Scope parse_scope(const std::string& s, bool allow_network, bool allow_host) {
    if (s == "system") return {"system", ""};
    if (s == "network" && allow_network) return {"network", ""};
    if (allow_host && s.rfind("host:", 0) == 0) return {"host", s.substr(5)};
    if (s.rfind("asset:", 0) == 0) return {"asset", s.substr(6)};
    if (s.rfind("component:", 0) == 0) return {"component", s.substr(10)};
    throw ValidationError("unknown scope '" + s + "'");
}

RiskParams assemble_params(const SystemModel& model, const std::string& params_file,
                           const std::string& dedup, std::ostream& err) {
    RiskParams p = model.params;
    if (!params_file.empty()) {
        std::ifstream in(params_file);
        if (!in) throw IoError("cannot read params file '" + params_file + "'");
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ValidationError("malformed params file '" + params_file + "': " + e.what());
        }
        p = params_from_json(doc, p);
    }
    if (dedup == "on") p.dedup_paths = true;
    if (dedup == "off") p.dedup_paths = false;
    for (const auto& w : validate_params(p)) err << "warning: " << w << "\n";
    return p;
}

std::vector<std::vector<std::string>> vuln_csv_rows(const SystemModel& model,
                                                    const RiskReport& r,
                                                    const Scope& scope) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"asset", "component", "cve_id", "cvss_base", "epss", "exploit", "ransomware",
                    "el", "pl", "direct", "indirect", "total"});
    const Host* host = scope.kind == "host" ? model.find_host(scope.id) : nullptr;
    for (const auto& v : r.vulnerabilities) {
        if (scope.kind == "asset" && v.asset_id != scope.id) continue;
        if (scope.kind == "component" && v.component_id != scope.id) continue;
        if (host) {
            bool member = false;
            for (const auto& aid : host->assets) member = member || aid == v.asset_id;
            if (!member) continue;
        }
        const VulnerabilityRecord* rec = lookup_record(model, v.asset_id, v.cve_id);
        rows.push_back({v.asset_id, v.component_id, v.cve_id, num(rec->cvss_base, 1),
                        num(rec->epss, 5), rec->exploit_exists ? "1" : "0",
                        rec->ransomware ? "1" : "0", num(v.exploit_likelihood, 6),
                        num(v.propagation_likelihood, 6), num(v.direct, 6), num(v.indirect, 6),
                        num(v.total, 6)});
    }
    return rows;
}

void render_risk_table(std::ostream& out, const SystemModel& model, const RiskReport& r,
                       const Scope& scope) {
    if (scope.kind == "system") {
        out << "system risk      " << num(r.system) << "\n";
        out << "  network        " << num(r.network) << "\n";
        out << "  host-based     " << num(r.host_total) << "\n\n";
        std::vector<std::vector<std::string>> hosts{{"host", "risk"}};
        for (const auto& [hid, hr] : r.host_risk) hosts.push_back({hid, num(hr)});
        print_table(out, hosts);
        out << "\n";
        std::vector<std::vector<std::string>> assets{
            {"asset", "risk", "criticality", "level", "centrality", "paths"}};
        for (const auto& a : r.assets)
            assets.push_back({a.id, num(a.risk), num(a.criticality.score),
                              std::to_string(a.criticality.level), num(a.centrality),
                              std::to_string(a.path_count)});
        print_table(out, assets);
        out << "\ncritical assets: "
            << (r.critical_assets.empty() ? "(none)" : join(r.critical_assets, ", ")) << "\n";
        if (!r.paths.empty()) {
            out << "\nattack paths\n";
            for (const auto& p : r.paths)
                out << "  " << join(p.nodes, " > ") << "  (weight " << num(p.total_weight, 1)
                    << ")\n";
        }
        out << "\n";
        std::vector<std::vector<std::string>> vulns{
            {"asset", "component", "cve", "el", "pl", "direct", "indirect", "total"}};
        for (const auto& v : r.vulnerabilities)
            vulns.push_back({v.asset_id, v.component_id, v.cve_id, num(v.exploit_likelihood),
                             num(v.propagation_likelihood), num(v.direct), num(v.indirect),
                             num(v.total)});
        print_table(out, vulns);
        for (const auto& n : r.notices) out << "note: " << n << "\n";
        return;
    }
    if (scope.kind == "network") {
        out << "network risk     " << num(r.network) << "\n";
        out << "critical assets: "
            << (r.critical_assets.empty() ? "(none)" : join(r.critical_assets, ", ")) << "\n";
        std::vector<std::vector<std::string>> counts{{"asset", "paths"}};
        for (const auto& a : r.assets)
            if (a.path_count > 0) counts.push_back({a.id, std::to_string(a.path_count)});
        if (counts.size() > 1) {
            out << "\n";
            print_table(out, counts);
        }
        if (!r.paths.empty()) {
            out << "\nattack paths\n";
            for (const auto& p : r.paths)
                out << "  " << join(p.nodes, " > ") << "  (weight " << num(p.total_weight, 1)
                    << ")\n";
        }
        for (const auto& n : r.notices) out << "note: " << n << "\n";
        return;
    }
    if (scope.kind == "host") {
        const Host* h = model.find_host(scope.id);
        out << "host " << scope.id << " risk  " << num(r.host_risk.at(scope.id)) << "\n\n";
        std::vector<std::vector<std::string>> assets{
            {"asset", "risk", "criticality", "level", "paths"}};
        for (const auto& aid : h->assets) {
            const AssetReport* a = r.asset(aid);
            assets.push_back({a->id, num(a->risk), num(a->criticality.score),
                              std::to_string(a->criticality.level),
                              std::to_string(a->path_count)});
        }
        print_table(out, assets);
        return;
    }
    if (scope.kind == "asset") {
        const AssetReport* a = r.asset(scope.id);
        out << "asset " << scope.id << "\n";
        out << "  risk         " << num(a->risk) << "\n";
        out << "  centrality   " << num(a->centrality) << "\n";
        out << "  criticality  " << num(a->criticality.score) << " (level "
            << a->criticality.level << (a->criticality.overridden ? ", overridden" : "")
            << ")\n";
        out << "  paths        " << a->path_count << "\n\n";
        std::vector<std::vector<std::string>> vulns{
            {"component", "cve", "el", "pl", "direct", "indirect", "total"}};
        for (const auto& v : r.vulnerabilities) {
            if (v.asset_id != scope.id) continue;
            vulns.push_back({v.component_id, v.cve_id, num(v.exploit_likelihood),
                             num(v.propagation_likelihood), num(v.direct), num(v.indirect),
                             num(v.total)});
        }
        print_table(out, vulns);
        return;
    }
    // component scope
    const ComponentReport* c = r.component(scope.id);
    out << "component " << scope.id << " (asset " << c->asset_id << ")\n";
    out << "  cvs                " << num(c->cvs) << "\n";
    out << "  local centrality   " << num(c->local_centrality) << "\n";
    out << "  system centrality  " << num(c->system_centrality) << "\n";
    out << "  risk               " << num(c->risk) << "\n";
}

ordered_json asset_block(const AssetReport& a) {
    return {{"id", a.id},
            {"risk", a.risk},
            {"centrality", a.centrality},
            {"criticality_score", a.criticality.score},
            {"criticality_level", a.criticality.level},
            {"criticality_overridden", a.criticality.overridden},
            {"path_count", a.path_count}};
}

ordered_json vuln_block(const VulnRiskBreakdown& v) {
    return {{"cve_id", v.cve_id},
            {"component", v.component_id},
            {"asset", v.asset_id},
            {"exploit_likelihood", v.exploit_likelihood},
            {"propagation_likelihood", v.propagation_likelihood},
            {"direct", v.direct},
            {"indirect", v.indirect},
            {"total", v.total},
            {"explanation", v.explanation}};
}

ordered_json render_risk_json(const SystemModel& model, const RiskReport& r, const Scope& scope,
                              const RiskParams& p) {
    if (scope.kind == "system") return report_to_json(r, model, p);
    ordered_json j;
    j["schema"] = "vulrg-report/1";
    j["scope"] = scope.kind + (scope.id.empty() ? "" : ":" + scope.id);
    if (scope.kind == "network") {
        j["network"] = r.network;
        j["critical_assets"] = r.critical_assets;
        j["attack_paths"] = ordered_json::array();
        for (const auto& path : r.paths)
            j["attack_paths"].push_back({{"source", path.source},
                                         {"target", path.target},
                                         {"nodes", path.nodes},
                                         {"total_weight", path.total_weight}});
        j["path_counts"] = ordered_json::object();
        for (const auto& a : r.assets)
            if (a.path_count > 0) j["path_counts"][a.id] = a.path_count;
        j["notices"] = r.notices;
    } else if (scope.kind == "host") {
        const Host* h = model.find_host(scope.id);
        j["host"] = {{"id", scope.id}, {"risk", r.host_risk.at(scope.id)}};
        j["assets"] = ordered_json::array();
        for (const auto& aid : h->assets) j["assets"].push_back(asset_block(*r.asset(aid)));
    } else if (scope.kind == "asset") {
        j["asset"] = asset_block(*r.asset(scope.id));
        j["vulnerabilities"] = ordered_json::array();
        for (const auto& v : r.vulnerabilities)
            if (v.asset_id == scope.id) j["vulnerabilities"].push_back(vuln_block(v));
    } else {
        const ComponentReport* c = r.component(scope.id);
        j["component"] = {{"id", c->id},
                          {"asset", c->asset_id},
                          {"cvs", c->cvs},
                          {"local_centrality", c->local_centrality},
                          {"system_centrality", c->system_centrality},
                          {"risk", c->risk}};
        j["vulnerabilities"] = ordered_json::array();
        for (const auto& v : r.vulnerabilities)
            if (v.component_id == scope.id) j["vulnerabilities"].push_back(vuln_block(v));
    }
    return j;
}

int cmd_validate(const std::string& inventory, const std::string& format, std::ostream& out,
                 std::ostream& err) {
    SystemModel model = load_system_model(inventory);
    std::vector<std::string> warnings = validate_params(model.params);
    size_t comps = 0, vulns = 0;
    for (const auto& a : model.assets) {
        comps += a.components.size();
        vulns += a.vulnerabilities.size();
    }
    if (format == "structured") {
        ordered_json j;
        j["schema"] = "vulrg-validate/1";
        j["valid"] = true;
        j["hosts"] = model.hosts.size();
        j["assets"] = model.assets.size();
        j["components"] = comps;
        j["vulnerabilities"] = vulns;
        j["warnings"] = warnings;
        out << j.dump(2) << "\n";
    } else {
        out << "inventory OK: " << model.hosts.size() << " host(s), " << model.assets.size()
            << " asset(s), " << comps << " component(s), " << vulns << " vulnerability(ies)\n";
        for (const auto& w : warnings) out << "warning: " << w << "\n";
    }
    (void)err;
    return kExitOk;
}

int cmd_risk(const std::string& inventory, const std::string& params_file,
             const std::string& scope_str, const std::string& format, const std::string& dedup,
             std::ostream& out, std::ostream& err) {
    SystemModel model = load_system_model(inventory);
    RiskParams p = assemble_params(model, params_file, dedup, err);
    Scope scope = parse_scope(scope_str, true, true);
    if (scope.kind == "network" && model.entry_points.empty())
        throw ValidationError("no entry points declared; network risk unavailable");
    if (scope.kind == "host" && !model.find_host(scope.id))
        throw ValidationError("unknown host '" + scope.id + "'");
    if (scope.kind == "asset" && !model.find_asset(scope.id))
        throw ValidationError("unknown asset '" + scope.id + "'");
    if (scope.kind == "component" && !model.find_component(scope.id))
        throw ValidationError("unknown component '" + scope.id + "'");
    RiskReport r = system_risk(model, p);
    if (format == "structured")
        out << render_risk_json(model, r, scope, p).dump(2) << "\n";
    else if (format == "csv")
        print_csv(out, vuln_csv_rows(model, r, scope));
    else
        render_risk_table(out, model, r, scope);
    return kExitOk;
}

int cmd_rank(const std::string& inventory, const std::string& params_file,
             const std::string& scope_str, const std::string& format, const std::string& dedup,
             int top, std::ostream& out, std::ostream& err) {
    SystemModel model = load_system_model(inventory);
    RiskParams p = assemble_params(model, params_file, dedup, err);
    PatchRanking ranking = rank_patches(model, p, scope_str);
    size_t limit = top < 0 ? ranking.entries.size()
                           : std::min(ranking.entries.size(), static_cast<size_t>(top));
    if (format == "structured") {
        ordered_json j;
        j["schema"] = "vulrg-rank/1";
        j["scope"] = ranking.scope;
        j["entries"] = ordered_json::array();
        for (size_t i = 0; i < limit; ++i) {
            const PatchEntry& e = ranking.entries[i];
            j["entries"].push_back({{"rank", e.rank},
                                    {"cve_id", e.cve_id},
                                    {"component", e.component_id},
                                    {"asset", e.asset_id},
                                    {"risk_before", e.risk_before},
                                    {"risk_after", e.risk_after},
                                    {"reduction", e.reduction},
                                    {"exploit_likelihood", e.exploit_likelihood},
                                    {"impact", e.impact},
                                    {"explanation", e.explanation}});
        }
        out << j.dump(2) << "\n";
        return kExitOk;
    }
    std::vector<std::vector<std::string>> rows{{"rank", "cve", "component", "asset", "cvss",
                                                "epss", "exploit", "ransomware", "el", "impact",
                                                "reduction"}};
    for (size_t i = 0; i < limit; ++i) {
        const PatchEntry& e = ranking.entries[i];
        const VulnerabilityRecord* rec = lookup_record(model, e.asset_id, e.cve_id);
        rows.push_back({std::to_string(e.rank), e.cve_id, e.component_id, e.asset_id,
                        num(rec->cvss_base, 1), num(rec->epss, 5),
                        rec->exploit_exists ? (format == "csv" ? "1" : "yes")
                                            : (format == "csv" ? "0" : "no"),
                        rec->ransomware ? (format == "csv" ? "1" : "yes")
                                        : (format == "csv" ? "0" : "no"),
                        num(e.exploit_likelihood, 6), num(e.impact, 1), num(e.reduction, 6)});
    }
    if (format == "csv")
        print_csv(out, rows);
    else
        print_table(out, rows);
    return kExitOk;
}

int cmd_whatif(const std::string& inventory, const std::string& params_file,
               const std::vector<std::string>& patch_args, const std::string& format,
               const std::string& dedup, std::ostream& out, std::ostream& err) {
    SystemModel model = load_system_model(inventory);
    RiskParams p = assemble_params(model, params_file, dedup, err);
    std::vector<std::pair<std::string, std::string>> patches;
    for (const auto& arg : patch_args) {
        size_t colon = arg.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 >= arg.size())
            throw ValidationError("--patch expects <asset>:<cve-id>, got '" + arg + "'");
        patches.push_back({arg.substr(0, colon), arg.substr(colon + 1)});
    }
    WhatIfResult w = what_if(model, p, patches);
    if (format == "structured") {
        ordered_json j;
        j["schema"] = "vulrg-whatif/1";
        j["patched"] = ordered_json::array();
        for (const auto& [aid, cve] : w.patched) j["patched"].push_back(cve + "@" + aid);
        auto level = [](const WhatIfLevel& l) {
            return ordered_json{{"before", l.before}, {"after", l.after}, {"delta", l.delta}};
        };
        j["system"] = level(w.system);
        j["network"] = level(w.network);
        j["host_based"] = level(w.host_total);
        j["hosts"] = ordered_json::object();
        for (const auto& [hid, l] : w.hosts) j["hosts"][hid] = level(l);
        j["assets"] = ordered_json::object();
        for (const auto& [aid, l] : w.assets) j["assets"][aid] = level(l);
        out << j.dump(2) << "\n";
        return kExitOk;
    }
    std::vector<std::vector<std::string>> rows{{"level", "before", "after", "delta"}};
    auto add = [&](const std::string& name, const WhatIfLevel& l) {
        rows.push_back({name, num(l.before, 6), num(l.after, 6), num(l.delta, 6)});
    };
    add("system", w.system);
    add("network", w.network);
    add("host_based", w.host_total);
    for (const auto& [hid, l] : w.hosts) add("host:" + hid, l);
    for (const auto& [aid, l] : w.assets) add("asset:" + aid, l);
    if (format == "csv") {
        print_csv(out, rows);
    } else {
        std::vector<std::string> names;
        for (const auto& [aid, cve] : w.patched) names.push_back(cve + "@" + aid);
        out << "patched: " << (names.empty() ? "(nothing)" : join(names, ", ")) << "\n\n";
        print_table(out, rows);
    }
    return kExitOk;
}

int cmd_enrich(const std::string& inventory, const std::string& out_path,
               const std::string& fixture_dir, const std::string& flags_file,
               const std::string& mode, const std::string& nvd_base,
               const std::string& epss_base, std::ostream& out, std::ostream& err) {
    EnrichOptions opts;
    opts.source = mode == "live" ? FetchSource::Live : FetchSource::Fixture;
    opts.fixture_dir = fixture_dir;
    if (!nvd_base.empty()) opts.nvd_base = nvd_base;
    if (!epss_base.empty()) opts.epss_base = epss_base;
    if (const char* key = std::getenv("VULRG_NVD_API_KEY")) opts.api_key = key;
    EnrichOutcome res = enrich_inventory(inventory, flags_file, opts);
    for (const auto& w : res.warnings) err << "warning: " << w << "\n";
    if (out_path.empty()) {
        out << res.document.dump(2) << "\n";
    } else {
        std::ofstream f(out_path);
        if (!f) throw IoError("cannot write enriched inventory '" + out_path + "'");
        f << res.document.dump(2) << "\n";
        out << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"graph-based vulnerability risk aggregation and patch ranking"};
    app.name("vulrg");
    app.require_subcommand(1);

    std::string inventory, params_file, scope = "system", format = "table", dedup, mode = "fixture";
    std::string out_path, fixture_dir, flags_file, nvd_base, epss_base;
    std::vector<std::string> patches;
    int top = -1;

    auto format_check = CLI::IsMember({"table", "csv", "structured"});

    CLI::App* validate = app.add_subcommand("validate", "check an inventory against all invariants");
    validate->add_option("--inventory", inventory, "inventory JSON path")->required();
    validate->add_option("--format", format, "output format")->check(format_check);

    CLI::App* risk = app.add_subcommand("risk", "compute risk scores at every level");
    risk->add_option("--inventory", inventory, "inventory JSON path")->required();
    risk->add_option("--params", params_file, "JSON file of parameter overrides");
    risk->add_option("--scope", scope,
                     "system, network, host:<id>, asset:<id> or component:<id>");
    risk->add_option("--format", format, "output format")->check(format_check);
    risk->add_option("--dedup-paths", dedup, "count each asset once across attack paths")
        ->check(CLI::IsMember({"on", "off"}));

    CLI::App* rank = app.add_subcommand("rank", "rank patches by risk reduction");
    rank->add_option("--inventory", inventory, "inventory JSON path")->required();
    rank->add_option("--params", params_file, "JSON file of parameter overrides");
    rank->add_option("--scope", scope, "system, asset:<id> or component:<id>");
    rank->add_option("--format", format, "output format")->check(format_check);
    rank->add_option("--top", top, "print only the first N entries")
        ->check(CLI::NonNegativeNumber);
    rank->add_option("--dedup-paths", dedup, "count each asset once across attack paths")
        ->check(CLI::IsMember({"on", "off"}));

    CLI::App* whatif = app.add_subcommand("whatif", "risk deltas for a hypothetical patch set");
    whatif->add_option("--inventory", inventory, "inventory JSON path")->required();
    whatif->add_option("--params", params_file, "JSON file of parameter overrides");
    whatif->add_option("--patch", patches, "patch as <asset>:<cve-id>, repeatable");
    whatif->add_option("--format", format, "output format")->check(format_check);
    whatif->add_option("--dedup-paths", dedup, "count each asset once across attack paths")
        ->check(CLI::IsMember({"on", "off"}));

    CLI::App* enrich = app.add_subcommand("enrich", "fill vulnerability data from NVD and EPSS");
    enrich->add_option("--inventory", inventory, "inventory JSON path")->required();
    enrich->add_option("--out", out_path, "write the enriched inventory here (default stdout)");
    enrich->add_option("--fixture-dir", fixture_dir,
                       "recorded responses; live mode caches here too");
    enrich->add_option("--flags-file", flags_file, "CSV of exploit/ransomware flags");
    enrich->add_option("--mode", mode, "fixture or live")
        ->check(CLI::IsMember({"fixture", "live"}));
    enrich->add_option("--nvd-base", nvd_base, "NVD API base URL override");
    enrich->add_option("--epss-base", epss_base, "EPSS API base URL override");

    std::vector<const char*> argv;
    argv.push_back("vulrg");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(inventory, format, out, err);
        if (app.got_subcommand(risk))
            return cmd_risk(inventory, params_file, scope, format, dedup, out, err);
        if (app.got_subcommand(rank))
            return cmd_rank(inventory, params_file, scope, format, dedup, top, out, err);
        if (app.got_subcommand(whatif))
            return cmd_whatif(inventory, params_file, patches, format, dedup, out, err);
        if (app.got_subcommand(enrich))
            return cmd_enrich(inventory, out_path, fixture_dir, flags_file, mode, nvd_base,
                              epss_base, out, err);
        err << "error: no subcommand\n";
        return kExitConfig;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace vulrg::cli
