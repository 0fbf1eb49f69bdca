#pragma once

#include "error.hpp"
#include "lts.hpp"
#include "ports.hpp"
#include "state_graph.hpp"

#include <deque>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace coordbridge {

/// γ: a data-agnostic interaction model, a set of port sets.
using interaction_set = std::set<port_set>;

class bip_component {
public:
    bip_component() = default;

    bip_component(std::string name, port_set ports, state_graph<port_set> graph)
        : name_(std::move(name)), ports_(std::move(ports)), graph_(std::move(graph))
    {
        for (const auto& p : ports_)
            if (!is_valid_port_name(p))
                throw error(errc::invalid_model, "invalid port name '" + p + "'");
        for (const auto& t : graph_.transitions())
            if (!is_subset(t.label, ports_))
                throw error(errc::invalid_model, "label " + to_string(t.label) + " of component '" + name_ +
                                                     "' is not a subset of its ports " + to_string(ports_));
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const port_set& ports() const { return ports_; }
    [[nodiscard]] const state_graph<port_set>& graph() const { return graph_; }

    friend bool operator==(const bip_component&, const bip_component&) = default;

private:
    std::string name_ = "C";
    port_set ports_;
    state_graph<port_set> graph_;
};

inline lts as_lts(const bip_component& c)
{
    return lts(alphabet::over_ports(c.ports()), c.graph().relabel([](const port_set& n) { return label(n); }));
}

inline port_set ports_of(const std::vector<bip_component>& components)
{
    port_set out;
    for (const auto& c : components)
        out.insert(c.ports().begin(), c.ports().end());
    return out;
}

inline void check_disconnected(const std::vector<bip_component>& components)
{
    port_set seen;
    for (const auto& c : components) {
        if (intersects(seen, c.ports()))
            throw error(errc::not_disconnected, "component '" + c.name() + "' shares ports " +
                                                    to_string(set_intersection(seen, c.ports())) +
                                                    " with another component");
        seen.insert(c.ports().begin(), c.ports().end());
    }
}

class bip_architecture {
public:
    bip_architecture() : gamma_{port_set{}} {}

    bip_architecture(std::string name, std::vector<bip_component> coordinators, port_set interface,
                     interaction_set gamma)
        : name_(std::move(name)), coordinators_(std::move(coordinators)), interface_(std::move(interface)),
          gamma_(std::move(gamma))
    {
        check_disconnected(coordinators_);
        for (const auto& p : interface_)
            if (!is_valid_port_name(p))
                throw error(errc::invalid_model, "invalid port name '" + p + "'");
        const auto internal = coordinator_ports();
        if (!is_subset(internal, interface_))
            throw error(errc::invalid_model, "coordinator ports " + to_string(set_difference(internal, interface_)) +
                                                 " are missing from the interface of '" + name_ + "'");
        for (const auto& n : gamma_)
            if (!is_subset(n, interface_))
                throw error(errc::interaction_out_of_interface, "interaction " + to_string(n) + " of '" + name_ +
                                                                    "' leaves the interface " +
                                                                    to_string(interface_));
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::vector<bip_component>& coordinators() const { return coordinators_; }
    [[nodiscard]] const port_set& interface() const { return interface_; }
    [[nodiscard]] const interaction_set& gamma() const { return gamma_; }
    [[nodiscard]] port_set coordinator_ports() const { return ports_of(coordinators_); }
    [[nodiscard]] port_set dangling_ports() const { return set_difference(interface_, coordinator_ports()); }

    friend bool operator==(const bip_architecture&, const bip_architecture&) = default;

private:
    std::string name_ = "A";
    std::vector<bip_component> coordinators_;
    port_set interface_;
    interaction_set gamma_;
};

struct apply_options {
    bool full_product = false;  // otherwise only the part reachable from the initial tuple
    enumeration_limits limits{};
};

namespace detail {

inline constexpr const char* dummy_state = "q_D";

struct constituent {
    const bip_component* component = nullptr;  // null for the implicit dummy
    port_set ports;
    std::size_t state_count = 1;
};

/// Architecture application over explicit constituents; when `dummy_ports`
/// is set, one extra constituent is the dummy component over those ports,
/// handled implicitly: it can fire any nonempty subset of its ports.
inline bip_component apply(const bip_architecture& arch, const std::vector<bip_component>& operands,
                           const std::optional<port_set>& dummy_ports, const apply_options& options)
{
    std::vector<bip_component> all = arch.coordinators();
    all.insert(all.end(), operands.begin(), operands.end());
    check_disconnected(all);

    std::vector<constituent> parts;
    for (const auto& c : arch.coordinators())
        parts.push_back({&c, c.ports(), c.graph().state_count()});
    for (const auto& c : operands)
        parts.push_back({&c, c.ports(), c.graph().state_count()});
    port_set system_ports = ports_of(all);
    if (dummy_ports) {
        if (intersects(system_ports, *dummy_ports))
            throw error(errc::not_disconnected, "dummy ports overlap the constituents");
        parts.push_back({nullptr, *dummy_ports, 1});
        system_ports.insert(dummy_ports->begin(), dummy_ports->end());
    }
    if (!is_subset(arch.interface(), system_ports))
        throw error(errc::interface_not_covered, "ports " + to_string(set_difference(arch.interface(), system_ports)) +
                                                     " of '" + arch.name() + "' belong to no constituent");

    std::uint64_t space = 1;
    for (const auto& p : parts) {
        space *= p.state_count;
        if (space > options.limits.max_candidates)
            throw error(errc::domain_too_large, "the application state space exceeds the bound of " +
                                                    std::to_string(options.limits.max_candidates));
    }

    const std::size_t k = parts.size();
    using tuple = std::vector<std::size_t>;
    auto encode = [&](const tuple& t) {
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < k; ++i)
            code = code * parts[i].state_count + t[i];
        return code;
    };

    std::unordered_map<std::uint64_t, std::size_t> index;
    std::vector<tuple> states;
    std::deque<std::size_t> queue;
    auto intern = [&](const tuple& t) {
        auto [it, fresh] = index.emplace(encode(t), states.size());
        if (fresh) {
            states.push_back(t);
            queue.push_back(it->second);
        }
        return it->second;
    };

    tuple init(k, 0);
    for (std::size_t i = 0; i < k; ++i)
        if (parts[i].component)
            init[i] = parts[i].component->graph().initial();
    const std::size_t init_index = intern(init);
    if (options.full_product) {
        tuple t(k, 0);
        for (std::uint64_t n = 0; n < space; ++n) {
            intern(t);
            for (std::size_t i = k; i-- > 0;) {
                if (++t[i] < parts[i].state_count)
                    break;
                t[i] = 0;
            }
        }
    }

    const port_set& interface = arch.interface();
    const bool empty_allowed = arch.gamma().count(port_set{}) > 0;
    std::vector<transition<port_set>> ts;

    while (!queue.empty()) {
        const std::size_t s = queue.front();
        queue.pop_front();
        const tuple current = states[s];

        // Rule 1: one constituent takes an ∅-step on its own.
        for (std::size_t i = 0; i < k; ++i) {
            if (!parts[i].component)
                continue;
            for (const auto& t : parts[i].component->graph().outgoing(current[i]))
                if (t.label.empty()) {
                    tuple next = current;
                    next[i] = t.target;
                    ts.push_back({s, {}, intern(next)});
                }
        }

        // Rule 2: choose for each explicit constituent either to idle or a
        // nonempty outgoing step; the union N must satisfy N ∩ P_A ∈ γ.
        tuple next = current;
        port_set chosen;
        std::uint64_t visited = 0;
        auto emit = [&](const port_set& n) {
            if (n.empty() && !empty_allowed)
                return;
            ts.push_back({s, n, intern(next)});
        };
        auto recurse = [&](auto&& self, std::size_t i) -> void {
            if (++visited > options.limits.max_candidates)
                throw error(errc::domain_too_large, "too many candidate interactions in one state");
            if (i == k || !parts[i].component) {
                if (i == k) {
                    if (arch.gamma().count(set_intersection(chosen, interface)))
                        emit(chosen);
                    return;
                }
                // The dummy joins with whatever part of an interaction lies
                // on its ports; it is always the last constituent.
                const port_set& mine = parts[i].ports;
                const port_set rest = set_intersection(chosen, interface);
                for (const auto& g : arch.gamma()) {
                    const port_set outside = set_difference(g, mine);
                    if (outside != rest)
                        continue;
                    const port_set own = set_intersection(g, mine);
                    emit(set_union(chosen, own));
                }
                return;
            }
            self(self, i + 1);
            for (const auto& t : parts[i].component->graph().outgoing(current[i])) {
                if (t.label.empty())
                    continue;
                next[i] = t.target;
                const port_set saved = chosen;
                chosen.insert(t.label.begin(), t.label.end());
                self(self, i + 1);
                chosen = saved;
                next[i] = current[i];
            }
        };
        recurse(recurse, 0);
    }

    std::vector<state_id> names;
    names.reserve(states.size());
    for (const auto& t : states) {
        std::vector<std::string> parts_names;
        for (std::size_t i = 0; i < k; ++i)
            parts_names.push_back(parts[i].component ? parts[i].component->graph().name(t[i]) : dummy_state);
        names.push_back(tuple_name(parts_names));
    }

    std::string name = arch.name() + "(";
    for (std::size_t i = 0; i < operands.size(); ++i)
        name += (i ? "," : "") + operands[i].name();
    if (dummy_ports)
        name += std::string(operands.empty() ? "" : ",") + "D";
    name += ")";
    return {std::move(name), system_ports, state_graph<port_set>(std::move(names), init_index, std::move(ts))};
}

} // namespace detail

/// A(ℬ): coordinators come first in the state tuple, then operands in order.
inline bip_component arch_apply(const bip_architecture& arch, const std::vector<bip_component>& operands,
                                const apply_options& options = {})
{
    return detail::apply(arch, operands, std::nullopt, options);
}

/// A1 ⊕ A2. Members of γ12 are exactly the unions G1 ∪ G2 that agree on the
/// shared interface, which is what the filtration over 2^{P1∪P2} keeps.
inline bip_architecture arch_compose(const bip_architecture& a1, const bip_architecture& a2)
{
    const auto c1 = a1.coordinator_ports();
    const auto c2 = a2.coordinator_ports();
    if (intersects(c1, c2))
        throw error(errc::coordinator_ports_overlap, "coordinators of '" + a1.name() + "' and '" + a2.name() +
                                                         "' share ports " + to_string(set_intersection(c1, c2)));
    interaction_set gamma;
    for (const auto& g1 : a1.gamma())
        for (const auto& g2 : a2.gamma())
            if (set_intersection(g1, a2.interface()) == set_intersection(g2, a1.interface()))
                gamma.insert(set_union(g1, g2));
    std::vector<bip_component> coordinators = a1.coordinators();
    coordinators.insert(coordinators.end(), a2.coordinators().begin(), a2.coordinators().end());
    return {a1.name() + "+" + a2.name(), std::move(coordinators), set_union(a1.interface(), a2.interface()),
            std::move(gamma)};
}

/// The dummy component over the dangling ports, materialized: one state
/// q_D and a self-loop for every nonempty subset.
inline bip_component dummy_component(const bip_architecture& arch, const enumeration_limits& limits = {})
{
    const auto dangling = arch.dangling_ports();
    std::vector<transition<port_set>> ts;
    for (auto& n : powerset(dangling, limits))
        if (!n.empty())
            ts.push_back({0, std::move(n), 0});
    return {"D", dangling, state_graph<port_set>({detail::dummy_state}, 0, std::move(ts))};
}

/// g_a: apply to the dummy component, then hide the coordinator ports.
inline lts interpret_arch(const bip_architecture& arch, const apply_options& options = {})
{
    const auto internal = arch.coordinator_ports();
    const auto applied = detail::apply(arch, {}, arch.dangling_ports(), options);
    return lts(alphabet::over_ports(arch.dangling_ports()),
               applied.graph().relabel([&](const port_set& n) { return label(set_difference(n, internal)); }));
}

} // namespace coordbridge
