#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "devs/core.hpp"
#include "support/test_models.hpp"

namespace testsupport {

// Flat description of a random test network: atomics in registration
// order plus directed out->in edges. Both the hierarchical and the flat
// executable forms, and the oracle, are derived from this.
struct FlatNetwork {
    std::vector<devs::AtomicPtr> atomics;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline FlatNetwork random_network(std::mt19937_64& rng) {
    FlatNetwork net;
    std::uniform_int_distribution<int> n_dist(2, 4);
    std::uniform_int_distribution<std::uint64_t> period(3, 17);
    std::uniform_int_distribution<int> kind(0, 2);
    int n = n_dist(rng);
    for (int i = 0; i < n; ++i) {
        std::string name = "m" + std::to_string(i);
        if (kind(rng) == 2)
            net.atomics.push_back(std::make_shared<AccumAtomic>(name, period(rng)));
        else
            net.atomics.push_back(
                std::make_shared<ToggleAtomic>(name, period(rng), kind(rng) == 1));
    }
    std::uniform_int_distribution<std::size_t> pick(0, net.atomics.size() - 1);
    std::uniform_int_distribution<int> n_edges(1, 2 * n);
    int m = n_edges(rng);
    for (int e = 0; e < m; ++e) {
        std::size_t s = pick(rng);
        std::size_t d = pick(rng);
        if (s == d) continue;  // self-coupling is rejected by validation
        net.edges.push_back({s, d});
    }
    return net;
}

// Single-level coupled model over the whole network.
inline devs::Model make_flat(const FlatNetwork& net) {
    auto spec = std::make_shared<devs::CoupledSpec>();
    spec->name = "flat";
    for (const auto& a : net.atomics) spec->components.push_back(a);
    for (const auto& [s, d] : net.edges)
        spec->ic.push_back({net.atomics[s]->name(), "out", net.atomics[d]->name(), "in"});
    return spec;
}

namespace detail {

inline std::string in_port(std::size_t k) { return "i" + std::to_string(k); }
inline std::string out_port(std::size_t k) { return "o" + std::to_string(k); }

// Builds the subtree for atomics [lo, hi). Coupled nodes expose one
// input and one output port per contained atomic, so any cross-subtree
// edge can be realized as an IC at the lowest common ancestor.
inline devs::Model build_subtree(const FlatNetwork& net, std::size_t lo, std::size_t hi, int depth,
                                 std::mt19937_64& rng) {
    if (hi - lo == 1) return net.atomics[lo];

    std::vector<std::size_t> cuts{lo};
    if (depth >= 3) {
        for (std::size_t k = lo + 1; k < hi; ++k) cuts.push_back(k);  // all leaves
    } else {
        std::uniform_int_distribution<int> parts_dist(2, static_cast<int>(std::min<std::size_t>(
                                                             3, hi - lo)));
        std::size_t parts = static_cast<std::size_t>(parts_dist(rng));
        // contiguous cut points keep depth-first order equal to the flat order
        std::vector<std::size_t> candidates;
        for (std::size_t k = lo + 1; k < hi; ++k) candidates.push_back(k);
        std::shuffle(candidates.begin(), candidates.end(), rng);
        candidates.resize(parts - 1);
        cuts.insert(cuts.end(), candidates.begin(), candidates.end());
        std::sort(cuts.begin(), cuts.end());
    }
    cuts.push_back(hi);

    auto spec = std::make_shared<devs::CoupledSpec>();
    spec->name = "g" + std::to_string(lo) + "_" + std::to_string(hi) + "_" + std::to_string(depth);
    struct ChildRange {
        std::size_t lo, hi;
        std::string name;
        bool atomic;
    };
    std::vector<ChildRange> ranges;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        devs::Model child = build_subtree(net, cuts[c], cuts[c + 1], depth + 1, rng);
        ranges.push_back({cuts[c], cuts[c + 1], devs::model_name(child),
                          std::holds_alternative<devs::AtomicPtr>(child)});
        spec->components.push_back(std::move(child));
    }

    auto child_in = [&](const ChildRange& r, std::size_t k) {
        return r.atomic ? std::string("in") : in_port(k);
    };
    auto child_out = [&](const ChildRange& r, std::size_t k) {
        return r.atomic ? std::string("out") : out_port(k);
    };

    for (const ChildRange& r : ranges) {
        for (std::size_t k = r.lo; k < r.hi; ++k) {
            spec->inputs.push_back({in_port(k), devs::PortDirection::input,
                                    devs::ValueKind::boolean});
            spec->outputs.push_back({out_port(k), devs::PortDirection::output,
                                     devs::ValueKind::boolean});
            spec->eic.push_back({in_port(k), r.name, child_in(r, k)});
            spec->eoc.push_back({r.name, child_out(r, k), out_port(k)});
        }
    }

    auto owner = [&](std::size_t k) -> const ChildRange& {
        for (const ChildRange& r : ranges)
            if (k >= r.lo && k < r.hi) return r;
        throw std::logic_error("atom outside range");
    };
    for (const auto& [s, d] : net.edges) {
        if (s < lo || s >= hi || d < lo || d >= hi) continue;
        const ChildRange& rs = owner(s);
        const ChildRange& rd = owner(d);
        if (rs.lo == rd.lo) continue;  // resolved deeper down
        spec->ic.push_back({rs.name, child_out(rs, s), rd.name, child_in(rd, d)});
    }
    return spec;
}

}  // namespace detail

// Random hierarchy (depth <= 3) over the same atomics and edges,
// preserving depth-first registration order.
inline devs::Model make_hierarchical(const FlatNetwork& net, std::mt19937_64& rng) {
    return detail::build_subtree(net, 0, net.atomics.size(), 1, rng);
}

}  // namespace testsupport
