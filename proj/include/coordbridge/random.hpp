#pragma once

#include "bip.hpp"
#include "data_constraint.hpp"
#include "interaction.hpp"
#include "lts.hpp"
#include "reo.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

// Seeded generators for property checks. Draws use plain modulo on
// mt19937_64 output so sequences are identical across standard libraries.

namespace coordbridge::gen {

using rng = std::mt19937_64;

struct bounds {
    unsigned max_states = 4;
    unsigned max_ports = 4;         // per coordinator / per port automaton
    unsigned max_coordinators = 2;
    unsigned max_bidirectional = 3; // data-sensitive models
    unsigned max_domain = 3;
    unsigned max_transitions = 3;   // per stateless automaton or model
};

inline std::size_t pick(rng& r, std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(r() % n); }
inline bool chance(rng& r, unsigned percent) { return r() % 100 < percent; }

/// Uniform subset of `pool`; nonempty when `nonempty` and the pool is not.
inline port_set subset(rng& r, const std::vector<port_name>& pool, bool nonempty = false)
{
    port_set out;
    do {
        out.clear();
        for (const auto& p : pool)
            if (chance(r, 50))
                out.insert(p);
    } while (nonempty && out.empty() && !pool.empty());
    return out;
}

inline std::vector<port_name> choose(rng& r, std::vector<port_name> pool, std::size_t count)
{
    for (std::size_t i = 0; i < pool.size(); ++i)
        std::swap(pool[i], pool[i + pick(r, pool.size() - i)]);
    pool.resize(std::min(count, pool.size()));
    std::sort(pool.begin(), pool.end());
    return pool;
}

inline std::vector<state_id> state_names(std::size_t n, const std::string& stem = "s")
{
    std::vector<state_id> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(stem + std::to_string(i));
    return out;
}

/// Random graph over nonempty labels drawn from `ports`. A spanning tree
/// rooted at the initial state keeps every state reachable.
inline state_graph<port_set> random_graph(rng& r, const std::vector<port_name>& ports, std::size_t states,
                                          std::size_t transitions, const std::string& stem = "s")
{
    std::vector<transition<port_set>> ts;
    for (std::size_t i = 1; i < states && !ports.empty(); ++i)
        ts.push_back({pick(r, i), subset(r, ports, true), i});
    for (std::size_t i = 0; i < transitions && !ports.empty(); ++i)
        ts.push_back({pick(r, states), subset(r, ports, true), pick(r, states)});
    return state_graph<port_set>(state_names(states, stem), 0, std::move(ts));
}

inline state_graph<port_set> with_empty_loops(const state_graph<port_set>& g)
{
    auto ts = g.transitions();
    for (std::size_t s = 0; s < g.state_count(); ++s)
        ts.push_back({s, {}, s});
    return state_graph<port_set>(g.states(), g.initial(), std::move(ts));
}

inline state_graph<port_set> with_state_changing_empty(rng& r, const state_graph<port_set>& g)
{
    auto ts = g.transitions();
    const std::size_t n = g.state_count();
    const std::size_t from = pick(r, n);
    ts.push_back({from, {}, (from + 1 + pick(r, n - 1)) % n});
    return state_graph<port_set>(g.states(), g.initial(), std::move(ts));
}

/// A port automaton in PA′ over a random subset of `pool`.
inline port_automaton pa_prime(rng& r, const bounds& b, const std::string& name,
                               const std::vector<port_name>& pool = {"a", "b", "c", "d"})
{
    const auto nodes = choose(r, pool, 1 + pick(r, std::min<std::size_t>(b.max_ports, pool.size())));
    const std::size_t n = 1 + pick(r, b.max_states);
    auto g = with_empty_loops(random_graph(r, nodes, n, 1 + pick(r, 2 * n + 1)));
    return {name, port_set(nodes.begin(), nodes.end()), std::move(g)};
}

/// A port automaton outside PA′: a missing ∅-loop or a state-changing ∅ step.
inline port_automaton pa_adversarial(rng& r, const bounds& b, const std::string& name,
                                     const std::vector<port_name>& pool = {"a", "b", "c", "d"})
{
    const auto nodes = choose(r, pool, 1 + pick(r, std::min<std::size_t>(b.max_ports, pool.size())));
    const std::size_t n = 2 + pick(r, std::max(1u, b.max_states - 1));
    auto g = random_graph(r, nodes, n, 1 + pick(r, 2 * n + 1));
    if (chance(r, 50))
        g = with_state_changing_empty(r, with_empty_loops(g));
    return {name, port_set(nodes.begin(), nodes.end()), std::move(g)};
}

struct architecture_shape {
    std::string prefix = "";                 // distinguishes coordinator ports of different architectures
    std::vector<port_name> shared_dangling;  // dangling ports also offered to a partner
};

/// An architecture in Arch′ with ∅ ∈ γ.
inline bip_architecture arch_prime(rng& r, const bounds& b, const std::string& name,
                                   const architecture_shape& shape = {})
{
    std::vector<bip_component> coordinators;
    std::vector<std::vector<port_set>> offers;  // labels coordinators can take, to seed γ
    const std::size_t count = chance(r, 15) ? 0 : 1 + pick(r, b.max_coordinators);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<port_name> ports;
        const std::size_t k = 1 + pick(r, b.max_ports);
        for (std::size_t j = 0; j < k; ++j)
            ports.push_back(shape.prefix + "c" + std::to_string(i) + "_" + std::to_string(j));
        const std::size_t n = 1 + pick(r, b.max_states);
        auto g = random_graph(r, ports, n, 1 + pick(r, 2 * n + 1), "q");
        if (chance(r, 50))
            g = with_empty_loops(g);
        std::vector<port_set> labels;
        for (const auto& t : g.transitions())
            labels.push_back(t.label);
        offers.push_back(std::move(labels));
        coordinators.emplace_back(shape.prefix + "C" + std::to_string(i), port_set(ports.begin(), ports.end()),
                                  std::move(g));
    }
    std::vector<port_name> dangling = shape.shared_dangling;
    const std::size_t own = pick(r, 3);
    for (std::size_t j = 0; j < own; ++j)
        dangling.push_back(shape.prefix + "d" + std::to_string(j));
    port_set interface = ports_of(coordinators);
    interface.insert(dangling.begin(), dangling.end());

    interaction_set gamma{port_set{}};
    for (const auto& labels : offers)
        for (const auto& l : labels)
            if (chance(r, 60))
                gamma.insert(set_union(l, subset(r, dangling)));
    const std::size_t extra = 1 + pick(r, 4);
    for (std::size_t i = 0; i < extra; ++i) {
        port_set n = subset(r, dangling);
        for (const auto& labels : offers)
            if (!labels.empty() && chance(r, 60)) {
                const auto& l = labels[pick(r, labels.size())];
                n.insert(l.begin(), l.end());
            }
        gamma.insert(std::move(n));
    }
    return {name, std::move(coordinators), std::move(interface), std::move(gamma)};
}

/// An architecture with a coordinator that takes a state-changing ∅ step.
inline bip_architecture arch_adversarial(rng& r, const bounds& b, const std::string& name,
                                         const architecture_shape& shape = {})
{
    auto base = arch_prime(r, b, name, shape);
    std::vector<port_name> ports{shape.prefix + "z0"};
    const std::size_t n = 2 + pick(r, std::max(1u, b.max_states - 1));
    auto g = with_state_changing_empty(r, random_graph(r, ports, n, n, "q"));
    auto coordinators = base.coordinators();
    coordinators.emplace_back(shape.prefix + "Z", port_set(ports.begin(), ports.end()), std::move(g));
    auto interface = base.interface();
    interface.insert(ports.begin(), ports.end());
    auto gamma = base.gamma();
    gamma.insert(port_set(ports.begin(), ports.end()));
    return {name, std::move(coordinators), std::move(interface), std::move(gamma)};
}

/// Two Arch′ architectures with disjoint coordinator ports that share some
/// dangling ports and both allow ∅: the composition theorems apply.
inline std::pair<bip_architecture, bip_architecture> composable_pair(rng& r, const bounds& b)
{
    const auto shared = choose(r, {"s0", "s1", "s2"}, pick(r, 4));
    return {arch_prime(r, b, "A1", {"u", shared}), arch_prime(r, b, "A2", {"v", shared})};
}

/// A pair that violates exactly one precondition of the composition
/// theorems; `kind` picks which (0: ∅ ∉ γ1, 1: P_C1 ∩ P_2 ≠ ∅,
/// 2: a state-changing ∅ step).
inline std::pair<bip_architecture, bip_architecture> adversarial_pair(rng& r, const bounds& b, unsigned kind)
{
    const auto shared = choose(r, {"s0", "s1", "s2"}, pick(r, 4));
    auto a1 = arch_prime(r, b, "A1", {"u", shared});
    auto a2 = arch_prime(r, b, "A2", {"v", shared});
    switch (kind % 3) {
    case 0: {
        auto gamma = a1.gamma();
        auto interface = a1.interface();
        gamma.erase(port_set{});
        if (gamma.empty()) {
            interface.insert("ux");
            gamma.insert({"ux"});
        }
        a1 = bip_architecture(a1.name(), a1.coordinators(), std::move(interface), std::move(gamma));
        break;
    }
    case 1: {
        auto coordinators = a1.coordinators();
        if (coordinators.empty()) {
            coordinators.emplace_back("uC0", port_set{"uc0_0"},
                                      state_graph<port_set>({"q0"}, 0, {{0, port_set{"uc0_0"}, 0}}));
        }
        const port_name leaked = *coordinators.front().ports().begin();
        a1 = bip_architecture(a1.name(), coordinators, set_union(a1.interface(), ports_of(coordinators)),
                              [&] {
                                  auto g = a1.gamma();
                                  g.insert({leaked});
                                  return g;
                              }());
        auto gamma2 = a2.gamma();
        gamma2.insert({leaked});
        a2 = bip_architecture(a2.name(), a2.coordinators(), set_union(a2.interface(), {leaked}), std::move(gamma2));
        break;
    }
    default: a1 = arch_adversarial(r, b, "A1", {"u", shared}); break;
    }
    return {a1, a2};
}

/// Two PA′ automata over overlapping node pools.
inline std::pair<port_automaton, port_automaton> pa_pair(rng& r, const bounds& b)
{
    return {pa_prime(r, b, "P1", {"a", "b", "c"}), pa_prime(r, b, "P2", {"b", "c", "d"})};
}

inline finite_domain small_domain(rng& r, const bounds& b)
{
    const std::size_t k = 1 + pick(r, b.max_domain);
    std::vector<datum> values;
    for (std::size_t i = 0; i < k; ++i)
        values.push_back(static_cast<datum>(i));
    return finite_domain::make("D", std::move(values));
}

/// Random guard whose free ports are drawn from `ports`.
inline data_constraint guard(rng& r, const std::vector<port_name>& ports, const finite_domain& dom, unsigned depth,
                             unsigned binder = 0)
{
    const auto value = [&] { return dom.values[pick(r, dom.size())]; };
    if (ports.empty())
        return chance(r, 80) ? dc::top() : dc::falsum();
    const auto port = [&] { return ports[pick(r, ports.size())]; };
    if (depth == 0 || chance(r, 35)) {
        switch (pick(r, 5)) {
        case 0: return dc::eq(port(), value());
        case 1: return dc::eq_ports(port(), port());
        case 2: {
            std::vector<datum> vs;
            for (auto v : dom.values)
                if (chance(r, 50))
                    vs.push_back(v);
            return dc::member(port(), std::move(vs));
        }
        case 3: return dc::fun_eq(port(), chance(r, 50) ? "max" : "min", {port(), port()});
        default: return dc::top();
        }
    }
    switch (pick(r, 4)) {
    case 0: return dc::negate(guard(r, ports, dom, depth - 1, binder));
    case 1: return dc::all_of({guard(r, ports, dom, depth - 1, binder), guard(r, ports, dom, depth - 1, binder)});
    case 2: return dc::any_of({guard(r, ports, dom, depth - 1, binder), guard(r, ports, dom, depth - 1, binder)});
    default: {
        auto inner = ports;
        const port_name z = "z" + std::to_string(binder);
        inner.push_back(z);
        return dc::exists(z, guard(r, inner, dom, depth - 1, binder + 1));
    }
    }
}

/// Stateless constraint automaton with polarity over at most three
/// bidirectional ports, with an optional mixed node.
inline polarized_ca polarized(rng& r, const bounds& b, const std::string& name = "R")
{
    const auto dom = small_domain(r, b);
    const auto ports = choose(r, {"a", "b", "c"}, 1 + pick(r, std::min(3u, b.max_bidirectional)));
    std::vector<port_name> nodes;
    for (const auto& p : ports) {
        switch (pick(r, 3)) {
        case 0: nodes.push_back(source_port(p)); break;
        case 1: nodes.push_back(sink_port(p)); break;
        default:
            nodes.push_back(source_port(p));
            nodes.push_back(sink_port(p));
        }
    }
    if (chance(r, 30))
        nodes.push_back("m");
    std::vector<transition<ca_label>> ts;
    const std::size_t count = 1 + pick(r, b.max_transitions);
    for (std::size_t i = 0; i < count; ++i) {
        auto n = subset(r, nodes, true);
        std::vector<port_name> fired(n.begin(), n.end());
        ts.push_back({0, {std::move(n), guard(r, fired, dom, 3)}, 0});
    }
    return polarized_ca(constraint_automaton(name, port_set(nodes.begin(), nodes.end()), dom, {},
                                             state_graph<ca_label>({"q"}, 0, std::move(ts))));
}

/// Interaction model whose connectors use extensional up and down tables.
inline interaction_model interaction(rng& r, const bounds& b, const std::string& name = "G")
{
    const auto dom = small_domain(r, b);
    const auto pool = choose(r, {"a", "b", "c"}, 1 + pick(r, std::min(3u, b.max_bidirectional)));
    std::vector<simple_connector> connectors;
    const std::size_t count = 1 + pick(r, b.max_transitions);
    for (std::size_t i = 0; i < count; ++i) {
        const auto bottom = subset(r, pool, true);
        const std::vector<port_name> inputs(bottom.begin(), bottom.end());
        const port_name local = "l";

        table_transfer up{inputs, {local}, {}};
        std::vector<datum> tuple(inputs.size(), dom.values.front());
        std::vector<std::size_t> digits(inputs.size(), 0);
        while (true) {
            for (std::size_t k = 0; k < inputs.size(); ++k)
                tuple[k] = dom.values[digits[k]];
            const std::size_t outs = pick(r, 3);
            for (std::size_t o = 0; o < outs; ++o)
                up.rows.emplace(tuple, std::vector<datum>{dom.values[pick(r, dom.size())]});
            std::size_t k = 0;
            for (; k < digits.size(); ++k) {
                if (++digits[k] < dom.size())
                    break;
                digits[k] = 0;
            }
            if (k == digits.size())
                break;
        }

        const auto written = subset(r, inputs, chance(r, 70));
        table_transfer down{{local}, {written.begin(), written.end()}, {}};
        for (auto v : dom.values) {
            std::vector<datum> out;
            for (std::size_t k = 0; k < written.size(); ++k)
                out.push_back(dom.values[pick(r, dom.size())]);
            down.rows.emplace(std::vector<datum>{v}, std::move(out));
        }
        connectors.push_back(validate_simple(
            {{"w" + std::to_string(i)}, bottom, {local}, guard(r, inputs, dom, 2), std::move(up), std::move(down)}));
    }
    return {name, dom, {}, {}, std::move(connectors)};
}

/// Random LTS over port-set labels, ∅ included.
inline lts random_lts(rng& r, std::size_t max_states, const std::vector<port_name>& ports)
{
    const std::size_t n = 1 + pick(r, max_states);
    std::vector<transition<label>> ts;
    const std::size_t count = pick(r, 2 * n + 2);
    for (std::size_t i = 0; i < count; ++i)
        ts.push_back({pick(r, n), label(subset(r, ports)), pick(r, n)});
    return lts(alphabet::over_ports(port_set(ports.begin(), ports.end())),
               state_graph<label>(state_names(n), 0, std::move(ts)));
}

/// A bisimilar copy of `l`: every state is split in two and each transition
/// is redirected to either copy of its target, keeping at least one.
inline lts split_states(rng& r, const lts& l)
{
    const auto& g = l.graph();
    const std::size_t n = g.state_count();
    std::vector<state_id> names;
    for (const auto& s : g.states()) {
        names.push_back(s + "a");
        names.push_back(s + "b");
    }
    std::vector<transition<label>> ts;
    for (const auto& t : g.transitions())
        for (std::size_t copy = 0; copy < 2; ++copy) {
            const std::size_t from = 2 * t.source + copy;
            const unsigned mode = static_cast<unsigned>(pick(r, 3));
            if (mode != 1)
                ts.push_back({from, t.label, 2 * t.target});
            if (mode != 0)
                ts.push_back({from, t.label, 2 * t.target + 1});
        }
    (void)n;
    return lts(l.alpha(), state_graph<label>(std::move(names), 2 * g.initial(), std::move(ts)));
}

} // namespace coordbridge::gen
