#pragma once

// Deterministic synthetic inventories for benchmarks and property tests.
// Header-only so the bench tool and the test binaries share one generator.

#include <random>
#include <string>
#include <vector>

#include "vulrg/model.hpp"

namespace vulrg::testgen {

// n_assets assets over 10 hosts, 3 components each, a communication chain
// behind an "internet" entry waypoint, and every 50th asset pinned critical.
// Structure and vulnerabilities draw from separate seeded streams, so two
// calls with the same n_assets and seed but different n_vulns share an
// identical topology (the smaller vulnerability set is a prefix).
inline SystemModel synthetic_model(int n_assets, int n_vulns, unsigned seed) {
    SystemModel m;
    std::mt19937 structure_rng(seed);
    std::mt19937 vuln_rng(seed + 1);

    int n_hosts = std::min(10, n_assets);
    m.hosts.resize(n_hosts);
    for (int h = 0; h < n_hosts; ++h) m.hosts[h].id = "h" + std::to_string(h);

    std::vector<int> host_of(n_assets);
    for (int k = 0; k < n_assets; ++k) {
        int h = k % n_hosts;
        host_of[k] = h;
        Asset a;
        a.id = "a" + std::to_string(k);
        a.name = "Synthetic asset " + std::to_string(k);
        a.host_ref = m.hosts[h].id;
        a.ip = "10." + std::to_string(k / 250) + "." + std::to_string((k / 50) % 5) + "." +
               std::to_string(k % 50 + 1);
        a.mac = "02:00:00:00:00:01";
        a.subnet = "10.0.0.0/8";
        a.business_criticality_level = 1 + k % 5;
        for (int c = 0; c < 3; ++c) {
            ComponentNode node;
            node.id = a.id + ".c" + std::to_string(c);
            node.vendor = "vendor" + std::to_string(c);
            node.product = "product" + std::to_string(c);
            node.version = "1." + std::to_string(k % 9);
            node.part = c == 2 ? Part::Os : Part::Application;
            a.components.push_back(std::move(node));
        }
        a.intra_edges.push_back({a.id + ".c0", a.id + ".c2", EdgeKind::ER, 2.0});
        a.intra_edges.push_back({a.id + ".c1", a.id + ".c2", EdgeKind::ER, 2.0});
        m.hosts[h].assets.push_back(a.id);
        m.assets.push_back(std::move(a));
    }

    // One service dependency per asset onto an earlier same-host asset, so
    // host graphs have real propagation structure.
    for (int k = 0; k < n_assets; ++k) {
        int h = host_of[k];
        std::vector<int> earlier;
        for (int j = 0; j < k; ++j)
            if (host_of[j] == h) earlier.push_back(j);
        if (earlier.empty()) continue;
        std::uniform_int_distribution<size_t> pick(0, earlier.size() - 1);
        int target = earlier[pick(structure_rng)];
        m.cross_asset_edges.push_back({"a" + std::to_string(k) + ".c2",
                                       "a" + std::to_string(target) + ".c2", EdgeKind::SR, 1.0});
    }

    m.waypoints.push_back("internet");
    m.entry_points.push_back("internet");
    m.communication_edges.push_back({"internet", "a0", 1.0});
    for (int k = 1; k < n_assets; ++k)
        m.communication_edges.push_back(
            {"a" + std::to_string(k - 1), "a" + std::to_string(k), 1.0});
    for (int k = 0; k < n_assets; k += 50) m.criticality_overrides["a" + std::to_string(k)] = 0.9;

    std::uniform_real_distribution<double> cvss(0.1, 10.0);
    std::uniform_real_distribution<double> lik(0.0, 3.9);
    std::uniform_real_distribution<double> imp(0.0, 6.0);
    std::uniform_real_distribution<double> epss(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> av(0, 3);
    const AttackVector avs[4] = {AttackVector::Network, AttackVector::Adjacent,
                                 AttackVector::Local, AttackVector::Physical};
    for (int j = 0; j < n_vulns; ++j) {
        int k = j % n_assets;
        VulnerabilityRecord v;
        v.cve_id = "CVE-1900-" + std::to_string(j);
        v.component_ref = "a" + std::to_string(k) + ".c" + std::to_string(j % 3);
        v.cvss_base = cvss(vuln_rng);
        v.likelihood_subscore = lik(vuln_rng);
        v.impact_subscore = imp(vuln_rng);
        v.epss = epss(vuln_rng);
        v.exploit_exists = coin(vuln_rng) == 1;
        v.scope_change = coin(vuln_rng) == 1;
        v.ransomware = coin(vuln_rng) == 1;
        v.attack_vector = avs[av(vuln_rng)];
        m.assets[k].components[j % 3].vulnerabilities.push_back(v.cve_id);
        m.assets[k].vulnerabilities.push_back(std::move(v));
    }
    return m;
}

// Small random-but-valid inventory for property sweeps: 1-3 hosts, up to
// three assets each, random dependency trees, a connected communication
// chain with optional extras, random vulnerabilities.
inline SystemModel random_model(std::mt19937& rng) {
    SystemModel m;
    std::uniform_int_distribution<int> nhosts_d(1, 3);
    std::uniform_int_distribution<int> nassets_d(1, 3);
    std::uniform_int_distribution<int> ncomp_d(1, 4);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int nhosts = nhosts_d(rng);
    int asset_counter = 0;
    for (int h = 0; h < nhosts; ++h) {
        Host host;
        host.id = "h" + std::to_string(h);
        int nassets = nassets_d(rng);
        for (int i = 0; i < nassets; ++i) {
            Asset a;
            a.id = "a" + std::to_string(asset_counter++);
            a.name = a.id;
            a.host_ref = host.id;
            a.ip = "10.0.0." + std::to_string(asset_counter);
            a.mac = "02:00:00:00:00:02";
            a.subnet = "10.0.0.0/24";
            a.business_criticality_level = 1 + static_cast<int>(unit(rng) * 5.999);
            int ncomp = ncomp_d(rng);
            for (int c = 0; c < ncomp; ++c) {
                ComponentNode node;
                node.id = a.id + ".c" + std::to_string(c);
                node.vendor = "v";
                node.product = "p";
                node.version = "1";
                node.part = c == 0 ? Part::Os : Part::Application;
                a.components.push_back(std::move(node));
            }
            // random tree onto earlier components keeps the edge set acyclic
            for (int c = 1; c < ncomp; ++c) {
                std::uniform_int_distribution<int> parent(0, c - 1);
                EdgeKind kind = coin(rng) ? EdgeKind::ER : EdgeKind::SR;
                a.intra_edges.push_back({a.id + ".c" + std::to_string(c),
                                         a.id + ".c" + std::to_string(parent(rng)), kind,
                                         kind_default_weight(kind)});
            }
            host.assets.push_back(a.id);
            m.assets.push_back(std::move(a));
        }
        m.hosts.push_back(std::move(host));
    }

    // communication chain over all assets; extra chords sometimes
    for (size_t i = 1; i < m.assets.size(); ++i)
        m.communication_edges.push_back(
            {m.assets[i - 1].id, m.assets[i].id, 1.0 + 4.0 * unit(rng)});
    if (m.assets.size() > 2 && coin(rng))
        m.communication_edges.push_back(
            {m.assets.front().id, m.assets.back().id, 1.0 + 4.0 * unit(rng)});
    if (coin(rng)) {
        m.waypoints.push_back("net");
        m.communication_edges.push_back({"net", m.assets.front().id, 1.0});
        m.entry_points.push_back("net");
    } else {
        m.entry_points.push_back(m.assets.front().id);
    }
    if (coin(rng)) m.criticality_overrides[m.assets.back().id] = 0.5 + 0.5 * unit(rng);

    std::uniform_int_distribution<int> nvuln_d(0, 6);
    const AttackVector avs[4] = {AttackVector::Network, AttackVector::Adjacent,
                                 AttackVector::Local, AttackVector::Physical};
    int cve_counter = 0;
    for (auto& a : m.assets) {
        int nv = nvuln_d(rng);
        for (int j = 0; j < nv; ++j) {
            VulnerabilityRecord v;
            v.cve_id = "CVE-1900-" + std::to_string(cve_counter++);
            size_t ci = static_cast<size_t>(unit(rng) * a.components.size());
            if (ci >= a.components.size()) ci = a.components.size() - 1;
            v.component_ref = a.components[ci].id;
            v.cvss_base = 10.0 * unit(rng);
            v.likelihood_subscore = 3.9 * unit(rng);
            v.impact_subscore = 6.0 * unit(rng);
            v.epss = unit(rng);
            v.exploit_exists = coin(rng) == 1;
            v.scope_change = coin(rng) == 1;
            v.ransomware = coin(rng) == 1;
            v.attack_vector = avs[static_cast<int>(unit(rng) * 3.999)];
            a.components[ci].vulnerabilities.push_back(v.cve_id);
            a.vulnerabilities.push_back(std::move(v));
        }
    }
    return m;
}

}  // namespace vulrg::testgen
