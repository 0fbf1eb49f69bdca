#pragma once

#include "error.hpp"
#include "ports.hpp"
#include "state_graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace coordbridge {

/// A datum or void; std::nullopt is void, i.e. no dataflow at that port.
using value = std::optional<datum>;

/// Total data assignment over a duplicated port set.
using assignment = std::map<port_name, value>;

/// A transition label: a port set for the data-agnostic alphabet 2^P, or a
/// total assignment for the data-sensitive alphabet (D+1)^{2P}.
using label = std::variant<port_set, assignment>;

inline std::string to_string(const value& v)
{
    return v ? std::to_string(*v) : std::string("void");
}

inline std::string to_string(const assignment& a)
{
    std::vector<std::string> parts;
    for (const auto& [port, v] : a)
        parts.push_back(port + "=" + to_string(v));
    return "[" + join(parts, ",") + "]";
}

inline std::string to_string(const label& l)
{
    return std::visit([](const auto& x) { return to_string(x); }, l);
}

struct alphabet {
    enum class kind { port_sets, assignments };

    kind type = kind::port_sets;
    port_set ports;             // P, or the duplicated set 2P
    std::vector<datum> domain;  // D, for assignment alphabets

    static alphabet over_ports(port_set ports) { return {kind::port_sets, std::move(ports), {}}; }

    static alphabet over_assignments(port_set two_p, std::vector<datum> domain)
    {
        std::sort(domain.begin(), domain.end());
        domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
        return {kind::assignments, std::move(two_p), std::move(domain)};
    }

    [[nodiscard]] bool conforms(const label& l) const
    {
        if (const auto* ports_label = std::get_if<port_set>(&l))
            return type == kind::port_sets && is_subset(*ports_label, ports);
        const auto& a = std::get<assignment>(l);
        if (type != kind::assignments || a.size() != ports.size())
            return false;
        auto p = ports.begin();
        for (const auto& [port, v] : a) {
            if (port != *p++)
                return false;
            if (v && !std::binary_search(domain.begin(), domain.end(), *v))
                return false;
        }
        return true;
    }

    // (D+1)^{2P} with 2P empty is the one-element alphabet whatever D is.
    friend bool operator==(const alphabet& a, const alphabet& b)
    {
        if (a.type != b.type || a.ports != b.ports)
            return false;
        return a.type == kind::port_sets || a.ports.empty() || a.domain == b.domain;
    }
};

inline std::string to_string(const alphabet& a)
{
    if (a.type == alphabet::kind::port_sets)
        return "2^" + to_string(a.ports);
    std::vector<std::string> d;
    for (auto v : a.domain)
        d.push_back(std::to_string(v));
    return "(" + ("{" + join(d, ",") + "}") + "+1)^" + to_string(a.ports);
}

class lts {
public:
    lts() : alphabet_(alphabet::over_ports({})) {}

    lts(alphabet alpha, state_graph<label> graph) : alphabet_(std::move(alpha)), graph_(std::move(graph))
    {
        for (const auto& t : graph_.transitions())
            if (!alphabet_.conforms(t.label))
                throw error(errc::invalid_model,
                            "label " + to_string(t.label) + " is outside the alphabet " + to_string(alphabet_));
    }

    [[nodiscard]] const alphabet& alpha() const { return alphabet_; }
    [[nodiscard]] const state_graph<label>& graph() const { return graph_; }
    [[nodiscard]] std::size_t state_count() const { return graph_.state_count(); }
    [[nodiscard]] const std::vector<transition<label>>& transitions() const { return graph_.transitions(); }

    friend bool operator==(const lts&, const lts&) = default;

private:
    alphabet alphabet_;
    state_graph<label> graph_;
};

inline lts reachable_part(const lts& l)
{
    return lts(l.alpha(), l.graph().reachable());
}

struct bisimulation_witness {
    std::vector<std::pair<state_id, state_id>> pairs;

    friend bool operator==(const bisimulation_witness&, const bisimulation_witness&) = default;
};

inline std::string to_string(const bisimulation_witness& w)
{
    std::vector<std::string> parts;
    for (const auto& [a, b] : w.pairs)
        parts.push_back("(" + a + " ~ " + b + ")");
    return "{" + join(parts, ", ") + "}";
}

enum class bisim_outcome { bisimilar, not_bisimilar, alphabet_mismatch };

struct bisim_verdict {
    bisim_outcome outcome = bisim_outcome::not_bisimilar;
    std::optional<bisimulation_witness> witness;
};

namespace detail {

// Coarsest stable partition of the disjoint union by signature refinement.
inline std::vector<std::size_t> refine_partition(const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& edges)
{
    const std::size_t n = edges.size();
    std::vector<std::size_t> block(n, 0);
    std::size_t block_count = 1;
    while (true) {
        std::map<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>, std::size_t> ids;
        std::vector<std::size_t> next(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<std::pair<std::size_t, std::size_t>> sig;
            sig.reserve(edges[s].size());
            for (const auto& [lid, target] : edges[s])
                sig.emplace_back(lid, block[target]);
            std::sort(sig.begin(), sig.end());
            sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
            auto [it, inserted] = ids.try_emplace({block[s], std::move(sig)}, ids.size());
            next[s] = it->second;
        }
        block = std::move(next);
        if (ids.size() == block_count)
            return block;
        block_count = ids.size();
    }
}

} // namespace detail

/// Strong bisimulation check. The witness is the largest bisimulation
/// between the two state spaces.
inline bisim_verdict compare_bisimulation(const lts& l1, const lts& l2)
{
    if (!(l1.alpha() == l2.alpha()))
        return {bisim_outcome::alphabet_mismatch, std::nullopt};

    const std::size_t n1 = l1.state_count();
    const std::size_t n = n1 + l2.state_count();
    std::map<label, std::size_t> label_ids;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges(n);
    auto add_edges = [&](const lts& l, std::size_t offset) {
        for (const auto& t : l.transitions()) {
            auto [it, inserted] = label_ids.try_emplace(t.label, label_ids.size());
            edges[t.source + offset].emplace_back(it->second, t.target + offset);
        }
    };
    add_edges(l1, 0);
    add_edges(l2, n1);

    const auto block = detail::refine_partition(edges);
    if (block[l1.graph().initial()] != block[n1 + l2.graph().initial()])
        return {bisim_outcome::not_bisimilar, std::nullopt};

    bisimulation_witness w;
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = n1; b < n; ++b)
            if (block[a] == block[b])
                w.pairs.emplace_back(l1.graph().name(a), l2.graph().name(b - n1));
    return {bisim_outcome::bisimilar, std::move(w)};
}

inline std::optional<bisimulation_witness> bisimilar(const lts& l1, const lts& l2)
{
    return compare_bisimulation(l1, l2).witness;
}

/// Checks the transfer condition of `w` verbatim, in both directions, and
/// that the initial states are related.
inline bool is_bisimulation(const lts& l1, const lts& l2, const bisimulation_witness& w)
{
    if (!(l1.alpha() == l2.alpha()))
        return false;
    std::set<std::pair<std::size_t, std::size_t>> rel;
    for (const auto& [a, b] : w.pairs) {
        auto i = l1.graph().find(a);
        auto j = l2.graph().find(b);
        if (!i || !j)
            return false;
        rel.emplace(*i, *j);
    }
    if (!rel.count({l1.graph().initial(), l2.graph().initial()}))
        return false;
    auto transfers = [&](const lts& from, const lts& to, std::size_t p, std::size_t q, bool flipped) {
        for (const auto& t : from.graph().outgoing(p)) {
            bool matched = false;
            for (const auto& u : to.graph().outgoing(q)) {
                if (u.label != t.label)
                    continue;
                const auto pair = flipped ? std::make_pair(u.target, t.target) : std::make_pair(t.target, u.target);
                if (rel.count(pair)) {
                    matched = true;
                    break;
                }
            }
            if (!matched)
                return false;
        }
        return true;
    };
    for (const auto& [p, q] : rel)
        if (!transfers(l1, l2, p, q, false) || !transfers(l2, l1, q, p, true))
            return false;
    return true;
}

/// Equality of single-state systems: same alphabet and same label set.
inline bool lts_identical(const lts& l1, const lts& l2)
{
    if (l1.state_count() != 1 || l2.state_count() != 1)
        throw error(errc::not_single_state, "lts_identical compares single-state systems only");
    if (!(l1.alpha() == l2.alpha()))
        return false;
    std::set<label> a;
    std::set<label> b;
    for (const auto& t : l1.transitions())
        a.insert(t.label);
    for (const auto& t : l2.transitions())
        b.insert(t.label);
    return a == b;
}

struct reachability_result {
    bool safe = true;
    std::vector<label> trace;             // shortest label sequence to a bad state
    std::optional<state_id> bad_state;
};

inline reachability_result check_unreachable(const lts& l, const std::function<bool(const state_id&)>& bad)
{
    const auto& g = l.graph();
    std::vector<std::optional<std::pair<std::size_t, std::size_t>>> parent(g.state_count());
    std::vector<bool> seen(g.state_count(), false);
    std::deque<std::size_t> queue{g.initial()};
    seen[g.initial()] = true;
    while (!queue.empty()) {
        const auto s = queue.front();
        queue.pop_front();
        if (bad && bad(g.name(s))) {
            reachability_result r;
            r.safe = false;
            r.bad_state = g.name(s);
            for (auto cur = s; parent[cur]; cur = parent[cur]->first)
                r.trace.push_back(g.transitions()[parent[cur]->second].label);
            std::reverse(r.trace.begin(), r.trace.end());
            return r;
        }
        const auto out = g.outgoing(s);
        for (std::size_t k = 0; k < out.size(); ++k) {
            const auto& t = out[k];
            if (!seen[t.target]) {
                seen[t.target] = true;
                parent[t.target] = std::make_pair(s, static_cast<std::size_t>(&t - g.transitions().data()));
                queue.push_back(t.target);
            }
        }
    }
    return {};
}

/// Deterministic observer run in lock-step with an LTS; reaching an error
/// state of the monitor violates the safety property it encodes.
struct safety_monitor {
    std::vector<std::string> states;
    std::size_t initial = 0;
    std::function<std::size_t(std::size_t, const label&)> step;
    std::set<std::size_t> errors;
};

inline reachability_result check_safety(const lts& l, const safety_monitor& m)
{
    const auto& g = l.graph();
    const std::size_t width = m.states.size();
    auto key = [&](std::size_t s, std::size_t q) { return s * width + q; };
    std::vector<std::optional<std::pair<std::size_t, label>>> parent(g.state_count() * width);
    std::vector<bool> seen(g.state_count() * width, false);
    std::deque<std::pair<std::size_t, std::size_t>> queue{{g.initial(), m.initial}};
    seen[key(g.initial(), m.initial)] = true;
    while (!queue.empty()) {
        const auto [s, q] = queue.front();
        queue.pop_front();
        if (m.errors.count(q)) {
            reachability_result r;
            r.safe = false;
            r.bad_state = tuple_name({g.name(s), m.states[q]});
            for (auto cur = key(s, q); parent[cur]; cur = parent[cur]->first)
                r.trace.push_back(parent[cur]->second);
            std::reverse(r.trace.begin(), r.trace.end());
            return r;
        }
        for (const auto& t : g.outgoing(s)) {
            const auto next = m.step(q, t.label);
            const auto k = key(t.target, next);
            if (!seen[k]) {
                seen[k] = true;
                parent[k] = std::make_pair(key(s, q), t.label);
                queue.emplace_back(t.target, next);
            }
        }
    }
    return {};
}

/// Graph isomorphism up to state renaming (initial state preserved).
inline bool isomorphic(const lts& l1, const lts& l2)
{
    const auto& g1 = l1.graph();
    const auto& g2 = l2.graph();
    if (!(l1.alpha() == l2.alpha()) || g1.state_count() != g2.state_count() ||
        g1.transitions().size() != g2.transitions().size())
        return false;

    const std::size_t n = g1.state_count();
    auto signature = [](const state_graph<label>& g) {
        std::vector<std::pair<std::vector<label>, std::size_t>> sig(g.state_count());
        for (const auto& t : g.transitions()) {
            sig[t.source].first.push_back(t.label);
            ++sig[t.target].second;
        }
        for (auto& s : sig)
            std::sort(s.first.begin(), s.first.end());
        return sig;
    };
    const auto sig1 = signature(g1);
    const auto sig2 = signature(g2);
    std::set<std::tuple<std::size_t, label, std::size_t>> edges2;
    for (const auto& t : g2.transitions())
        edges2.emplace(t.source, t.label, t.target);

    // Visit order: BFS from the initial state, then whatever is left.
    std::vector<std::size_t> order;
    {
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> queue{g1.initial()};
        seen[g1.initial()] = true;
        while (!queue.empty()) {
            auto s = queue.front();
            queue.pop_front();
            order.push_back(s);
            for (const auto& t : g1.outgoing(s))
                if (!seen[t.target]) {
                    seen[t.target] = true;
                    queue.push_back(t.target);
                }
        }
        for (std::size_t s = 0; s < n; ++s)
            if (!seen[s])
                order.push_back(s);
    }

    std::vector<std::optional<std::size_t>> map(n);
    std::vector<bool> used(n, false);
    std::function<bool(std::size_t)> extend = [&](std::size_t k) -> bool {
        if (k == n)
            return true;
        const auto s = order[k];
        for (std::size_t c = 0; c < n; ++c) {
            if (used[c] || sig1[s] != sig2[c])
                continue;
            if (k == 0 && c != g2.initial())
                continue;
            map[s] = c;
            bool ok = true;
            for (const auto& t : g1.transitions()) {
                if (t.source != s && t.target != s)
                    continue;
                if (!map[t.source] || !map[t.target])
                    continue;
                if (!edges2.count({*map[t.source], t.label, *map[t.target]})) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                used[c] = true;
                if (extend(k + 1))
                    return true;
                used[c] = false;
            }
            map[s].reset();
        }
        return false;
    };
    return extend(0);
}

} // namespace coordbridge
