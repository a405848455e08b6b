#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"
#include "vulrg/rank.hpp"

using nlohmann::json;
using namespace vulrg;

TEST_CASE("system ranking matches the frozen enterprise order and reductions") {
    SystemModel m = load_system_model(support::fixture("enterprise.json"));
    PatchRanking r = rank_patches(m, m.params, "system");
    json golden = support::golden("enterprise");

    std::vector<std::string> keys = support::order_keys(r);
    std::vector<std::string> want = golden["order"].get<std::vector<std::string>>();
    CHECK(keys == want);

    for (const auto& e : r.entries) {
        std::string key = e.cve_id + "@" + e.asset_id;
        INFO("entry " << key);
        CHECK(support::close(e.reduction, golden["reductions"][key].get<double>()));
        CHECK(support::close(e.risk_before - e.risk_after, e.reduction, 1e-9));
        CHECK(e.reduction >= -1e-12);
        CHECK(!e.explanation.empty());
    }

    // ranks are dense from 1 and only tie on equal reduction
    CHECK(r.entries.front().rank == 1);
    for (size_t i = 1; i < r.entries.size(); ++i) {
        const auto& prev = r.entries[i - 1];
        const auto& cur = r.entries[i];
        CHECK(cur.reduction <= prev.reduction + 1e-15);
        if (cur.reduction == prev.reduction)
            CHECK(cur.rank == prev.rank);
        else
            CHECK(cur.rank == prev.rank + 1);
    }
}

TEST_CASE("asset scope ranking orders by per-vulnerability totals") {
    SystemModel m = load_system_model(support::fixture("enterprise.json"));
    PatchRanking r = rank_patches(m, m.params, "asset:web_server");
    REQUIRE(r.entries.size() >= 3);
    CHECK(r.entries[0].cve_id == "CVE-2021-3156");
    CHECK(r.entries[1].cve_id == "CVE-2020-1938");
    CHECK(r.entries[2].cve_id == "CVE-2021-41773");

    RiskReport full = system_risk(m, m.params);
    double asset_total = full.asset("web_server")->risk;
    for (const auto& e : r.entries) {
        CHECK(e.asset_id == "web_server");
        const VulnRiskBreakdown* b = full.find(e.cve_id + "@web_server");
        REQUIRE(b != nullptr);
        CHECK(support::close(e.reduction, b->total, 1e-9));
        CHECK(support::close(e.risk_before, asset_total, 1e-9));
        CHECK(support::close(e.risk_after, asset_total - b->total, 1e-9));
    }
}

TEST_CASE("component scope reductions decompose the component risk") {
    SystemModel m = load_system_model(support::fixture("enterprise.json"));
    PatchRanking r = rank_patches(m, m.params, "component:web.tomcat");
    const Asset* web = m.find_asset("web_server");
    double before = component_risk(m, *web, "web.tomcat", m.params);
    double sum = 0.0;
    for (const auto& e : r.entries) {
        CHECK(e.component_id == "web.tomcat");
        CHECK(support::close(e.risk_before, before, 1e-9));
        sum += e.reduction;
    }
    // removing every CVE zeroes the score, so reductions sum to it
    CHECK(support::close(sum, before, 1e-9));
    // and each after-value is reachable by an actual recomputation
    for (const auto& e : r.entries) {
        SystemModel patched = m;
        for (auto& a : patched.assets) {
            if (a.id != "web_server") continue;
            std::vector<VulnerabilityRecord> kept;
            for (const auto& v : a.vulnerabilities)
                if (v.cve_id != e.cve_id) kept.push_back(v);
            a.vulnerabilities = kept;
            for (auto& c : a.components) {
                std::vector<std::string> ids;
                for (const auto& v : kept)
                    if (v.component_ref == c.id) ids.push_back(v.cve_id);
                c.vulnerabilities = ids;
            }
        }
        const Asset* pa = patched.find_asset("web_server");
        CHECK(support::close(e.risk_after, component_risk(patched, *pa, "web.tomcat", patched.params),
                             1e-9));
    }
}

TEST_CASE("single-asset ranking reproduces the frozen sequence") {
    SystemModel m = load_system_model(support::fixture("as1.json"));
    PatchRanking r = rank_patches(m, m.params, "system");
    json golden = support::golden("as1");
    CHECK(support::order_keys(r) == golden["order"].get<std::vector<std::string>>());
    std::vector<std::string> cves;
    for (const auto& e : r.entries) cves.push_back(e.cve_id);
    std::vector<std::string> want = {"CVE-2016-5325", "CVE-2014-0160", "CVE-2018-0734",
                                     "CVE-2018-5407", "CVE-2014-0076"};
    CHECK(cves == want);
}

TEST_CASE("zero-reduction entries share the last rank") {
    SystemModel m = load_system_model(support::fixture("as1.json"));
    // neutralize one CVE: no exploit signal at all
    for (auto& a : m.assets)
        for (auto& v : a.vulnerabilities)
            if (v.cve_id == "CVE-2014-0076") {
                v.likelihood_subscore = 0.0;
                v.epss = 0.0;
                v.exploit_exists = false;
                v.scope_change = false;
                v.ransomware = false;
            }
    PatchRanking r = rank_patches(m, m.params, "system");
    const PatchEntry& last = r.entries.back();
    CHECK(last.cve_id == "CVE-2014-0076");
    CHECK(last.reduction == 0.0);
    CHECK(last.rank == r.entries[r.entries.size() - 2].rank + 1);
}

TEST_CASE("unknown scopes and ids are rejected") {
    SystemModel m = load_system_model(support::fixture("as1.json"));
    CHECK_THROWS_AS(rank_patches(m, m.params, "asset:ghost"), ValidationError);
    CHECK_THROWS_AS(rank_patches(m, m.params, "component:ghost"), ValidationError);
    CHECK_THROWS_AS(rank_patches(m, m.params, "galaxy"), ValidationError);
    CHECK_THROWS_AS(rank_patches(m, m.params, "asset:"), ValidationError);
}

TEST_CASE("network profile rankings hit the frozen orders") {
    json golden = support::golden("as2");
    for (const char* np : {"np1", "np2"}) {
        SystemModel m = load_system_model(
            support::fixture(std::string("as2_") + np + ".json"));
        PatchRanking r = rank_patches(m, m.params, "system");
        INFO("profile " << np);
        CHECK(support::order_keys(r) == golden[np]["order"].get<std::vector<std::string>>());
    }
}

TEST_CASE("what-if removes the patch set and re-evaluates") {
    SystemModel m = load_system_model(support::fixture("enterprise.json"));
    RiskReport before = system_risk(m, m.params);

    SUBCASE("single patch agrees with direct model surgery") {
        WhatIfResult w = what_if(m, m.params, {{"web_server", "CVE-2021-3156"}});
        CHECK(support::close(w.system.before, before.system, 1e-9));
        CHECK(w.system.delta < 0.0);
        CHECK(support::close(w.system.after - w.system.before, w.system.delta, 1e-12));

        SystemModel cut = m;
        for (auto& a : cut.assets) {
            if (a.id != "web_server") continue;
            std::vector<VulnerabilityRecord> kept;
            for (const auto& v : a.vulnerabilities)
                if (v.cve_id != "CVE-2021-3156") kept.push_back(v);
            a.vulnerabilities = kept;
            for (auto& c : a.components) {
                std::vector<std::string> ids;
                for (const auto& v : kept)
                    if (v.component_ref == c.id) ids.push_back(v.cve_id);
                c.vulnerabilities = ids;
            }
        }
        RiskReport after = system_risk(cut, cut.params);
        CHECK(support::close(w.system.after, after.system, 1e-9));
        CHECK(support::close(w.network.after, after.network, 1e-9));
        CHECK(support::close(w.host_total.after, after.host_total, 1e-9));
        CHECK(w.assets.count("web_server") == 1);
    }
    SUBCASE("duplicate pairs collapse") {
        WhatIfResult once = what_if(m, m.params, {{"web_server", "CVE-2021-3156"}});
        WhatIfResult twice = what_if(m, m.params, {{"web_server", "CVE-2021-3156"},
                                                   {"web_server", "CVE-2021-3156"}});
        CHECK(once.patched == twice.patched);
        CHECK(support::close(once.system.after, twice.system.after, 1e-12));
    }
    SUBCASE("empty set changes nothing") {
        WhatIfResult w = what_if(m, m.params, {});
        CHECK(w.system.delta == 0.0);
        CHECK(w.assets.empty());
    }
    SUBCASE("patching everything leaves zero risk") {
        std::vector<std::pair<std::string, std::string>> all;
        for (const auto& a : m.assets)
            for (const auto& v : a.vulnerabilities) all.push_back({a.id, v.cve_id});
        WhatIfResult w = what_if(m, m.params, all);
        CHECK(w.system.after == 0.0);
        CHECK(w.network.after == 0.0);
        CHECK(w.host_total.after == 0.0);
    }
    SUBCASE("unknown pairs are named") {
        try {
            what_if(m, m.params, {{"web_server", "CVE-1900-0000"}});
            FAIL_CHECK("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("CVE-1900-0000@web_server") != std::string::npos);
        }
    }
}

TEST_CASE("top-ranked system patch beats any ad-hoc alternative") {
    SystemModel m = load_system_model(support::fixture("enterprise.json"));
    PatchRanking r = rank_patches(m, m.params, "system");
    const PatchEntry& top = r.entries.front();
    WhatIfResult best = what_if(m, m.params, {{top.asset_id, top.cve_id}});
    // sample a handful of other single patches; none should beat the top one
    std::mt19937 rng(7);
    std::vector<const PatchEntry*> rest;
    for (size_t i = 1; i < r.entries.size(); ++i) rest.push_back(&r.entries[i]);
    std::shuffle(rest.begin(), rest.end(), rng);
    for (size_t i = 0; i < 5 && i < rest.size(); ++i) {
        WhatIfResult w = what_if(m, m.params, {{rest[i]->asset_id, rest[i]->cve_id}});
        CHECK(best.system.after <= w.system.after + 1e-9);
    }
}

TEST_CASE("component factor ranking orders by likelihood times impact") {
    SystemModel m = load_system_model(support::fixture("enterprise.json"));
    auto entries = component_factor_rank(m, "web.tomcat", m.params);
    REQUIRE(!entries.empty());
    CHECK(entries.front().cve_id == "CVE-2020-1938");
    for (size_t i = 1; i < entries.size(); ++i) {
        double prev = entries[i - 1].exploit_likelihood * entries[i - 1].impact;
        double cur = entries[i].exploit_likelihood * entries[i].impact;
        CHECK(cur <= prev + 1e-12);
    }
    CHECK(entries.front().rank == 1);
    CHECK_THROWS_AS(component_factor_rank(m, "ghost", m.params), ValidationError);
}

TEST_CASE("ranking ignores vulnerability declaration order") {
    SystemModel m = load_system_model(support::fixture("enterprise.json"));
    PatchRanking base = rank_patches(m, m.params, "system");

    SystemModel shuffled = m;
    std::mt19937 rng(99);
    for (auto& a : shuffled.assets) {
        std::shuffle(a.vulnerabilities.begin(), a.vulnerabilities.end(), rng);
        for (auto& c : a.components) {
            std::vector<std::string> ids;
            for (const auto& v : a.vulnerabilities)
                if (v.component_ref == c.id) ids.push_back(v.cve_id);
            c.vulnerabilities = ids;
        }
    }
    PatchRanking again = rank_patches(shuffled, shuffled.params, "system");
    CHECK(support::order_keys(base) == support::order_keys(again));
    for (size_t i = 0; i < base.entries.size(); ++i) {
        CHECK(base.entries[i].rank == again.entries[i].rank);
        CHECK(support::close(base.entries[i].reduction, again.entries[i].reduction, 1e-12));
    }
}

TEST_CASE("scaling every impact leaves the top system patch in place") {
    SystemModel m = load_system_model(support::fixture("enterprise.json"));
    PatchRanking base = rank_patches(m, m.params, "system");
    SystemModel scaled = m;
    for (auto& a : scaled.assets)
        for (auto& v : a.vulnerabilities) v.impact_subscore *= 0.5;
    PatchRanking after = rank_patches(scaled, scaled.params, "system");
    CHECK(base.entries.front().cve_id == after.entries.front().cve_id);
    CHECK(base.entries.front().asset_id == after.entries.front().asset_id);
}
