#pragma once

#include "data_constraint.hpp"
#include "error.hpp"
#include "lts.hpp"
#include "ports.hpp"
#include "state_graph.hpp"

#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace coordbridge {

struct ca_label {
    port_set ports;
    data_constraint guard;

    friend bool operator==(const ca_label&, const ca_label&) = default;
    friend bool operator<(const ca_label& a, const ca_label& b)
    {
        return std::tie(a.ports, a.guard) < std::tie(b.ports, b.guard);
    }
};

inline std::string to_string(const ca_label& l)
{
    return l.guard.is_top() ? to_string(l.ports) : to_string(l.ports) + ", " + to_string(l.guard);
}

class port_automaton {
public:
    port_automaton() = default;

    port_automaton(std::string name, port_set nodes, state_graph<port_set> graph)
        : name_(std::move(name)), nodes_(std::move(nodes)), graph_(std::move(graph))
    {
        for (const auto& n : nodes_)
            if (!is_valid_port_name(n))
                throw error(errc::invalid_model, "invalid node name '" + n + "'");
        for (const auto& t : graph_.transitions())
            if (!is_subset(t.label, nodes_))
                throw error(errc::invalid_model, "label " + to_string(t.label) + " of '" + name_ +
                                                     "' is not a subset of its nodes " + to_string(nodes_));
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const port_set& nodes() const { return nodes_; }
    [[nodiscard]] const state_graph<port_set>& graph() const { return graph_; }

    [[nodiscard]] port_automaton renamed(std::string name) const { return {std::move(name), nodes_, graph_}; }

    friend bool operator==(const port_automaton&, const port_automaton&) = default;

private:
    std::string name_ = "A";
    port_set nodes_;
    state_graph<port_set> graph_;
};

class constraint_automaton {
public:
    constraint_automaton() = default;

    constraint_automaton(std::string name, port_set nodes, finite_domain domain, function_table functions,
                         state_graph<ca_label> graph)
        : name_(std::move(name)), nodes_(std::move(nodes)), domain_(std::move(domain)),
          functions_(std::move(functions)), graph_(std::move(graph))
    {
        for (const auto& n : nodes_)
            if (!is_valid_node_name(n))
                throw error(errc::invalid_model, "invalid node name '" + n + "'");
        for (const auto& t : graph_.transitions()) {
            if (!is_subset(t.label.ports, nodes_))
                throw error(errc::invalid_model, "label " + to_string(t.label.ports) + " of '" + name_ +
                                                     "' is not a subset of its nodes " + to_string(nodes_));
            if (!is_subset(free_ports(t.label.guard), t.label.ports))
                throw error(errc::invalid_model, "guard '" + to_string(t.label.guard) +
                                                     "' mentions ports outside its firing set " +
                                                     to_string(t.label.ports));
            check_functions(t.label.guard);
        }
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const port_set& nodes() const { return nodes_; }
    [[nodiscard]] const finite_domain& domain() const { return domain_; }
    [[nodiscard]] const function_table& functions() const { return functions_; }
    [[nodiscard]] const state_graph<ca_label>& graph() const { return graph_; }

    friend bool operator==(const constraint_automaton&, const constraint_automaton&) = default;

private:
    void check_functions(const data_constraint& g) const
    {
        if (g.type() == dc::kind::fun_eq && !functions_.contains(g.get().function))
            throw error(errc::unknown_function, "function '" + g.get().function + "' is not declared");
        for (const auto& c : g.children())
            check_functions(c);
    }

    std::string name_ = "A";
    port_set nodes_;
    finite_domain domain_ = finite_domain::singleton();
    function_table functions_;
    state_graph<ca_label> graph_;
};

inline bool is_stateless(const constraint_automaton& a) { return a.graph().state_count() == 1; }
inline bool is_stateless(const port_automaton& a) { return a.graph().state_count() == 1; }
inline bool is_port_automaton(const constraint_automaton& a) { return a.domain().size() == 1; }

/// Stateless constraint automaton whose nodes are split by suffix into
/// sources p*, sinks p_* and mixed nodes. Missing siblings of boundary nodes
/// are added as unused nodes so that sources = P* and sinks = P_*.
class polarized_ca {
public:
    polarized_ca() = default;

    explicit polarized_ca(const constraint_automaton& a)
    {
        if (!is_stateless(a))
            throw error(errc::not_stateless, "'" + a.name() + "' has " + std::to_string(a.graph().state_count()) +
                                                 " states");
        port_set boundary;
        for (const auto& n : a.nodes()) {
            if (polarity_of(n) == polarity::mixed) {
                mixed_.insert(n);
                continue;
            }
            boundary.insert(base_port(n));
        }
        for (const auto& p : boundary) {
            sources_.insert(source_port(p));
            sinks_.insert(sink_port(p));
        }
        for (const auto& m : mixed_)
            if (sources_.count(m) || sinks_.count(m))
                throw error(errc::invalid_model, "node '" + m + "' cannot be both mixed and boundary");
        automaton_ = constraint_automaton(a.name(), set_union(a.nodes(), set_union(sources_, sinks_)), a.domain(),
                                          a.functions(), a.graph());
    }

    [[nodiscard]] const constraint_automaton& automaton() const { return automaton_; }
    [[nodiscard]] const port_set& sources() const { return sources_; }
    [[nodiscard]] const port_set& mixed() const { return mixed_; }
    [[nodiscard]] const port_set& sinks() const { return sinks_; }
    [[nodiscard]] port_set bidirectional_ports() const { return base_ports(sources_); }

    friend bool operator==(const polarized_ca&, const polarized_ca&) = default;

private:
    constraint_automaton automaton_;
    port_set sources_, mixed_, sinks_;
};

namespace detail {

/// Def. product on bare graphs: rule 1 joins compatible pairs, rule 2 lets
/// one side move alone when its label avoids the other side's nodes.
template <class Label, class PortsOf, class Join>
state_graph<Label> synchronous_product(const state_graph<Label>& g1, const port_set& n1, const state_graph<Label>& g2,
                                       const port_set& n2, PortsOf ports_of, Join join)
{
    const std::size_t m = g2.state_count();
    auto pair = [m](std::size_t a, std::size_t b) { return a * m + b; };
    std::vector<state_id> names;
    names.reserve(g1.state_count() * m);
    for (const auto& s1 : g1.states())
        for (const auto& s2 : g2.states())
            names.push_back(tuple_name({s1, s2}));

    std::vector<transition<Label>> ts;
    for (const auto& t1 : g1.transitions()) {
        const port_set& a = ports_of(t1.label);
        const port_set shared1 = set_intersection(a, n2);
        for (const auto& t2 : g2.transitions())
            if (shared1 == set_intersection(ports_of(t2.label), n1))
                ts.push_back({pair(t1.source, t2.source), join(t1.label, t2.label), pair(t1.target, t2.target)});
        if (shared1.empty())
            for (std::size_t q2 = 0; q2 < m; ++q2)
                ts.push_back({pair(t1.source, q2), t1.label, pair(t1.target, q2)});
    }
    for (const auto& t2 : g2.transitions())
        if (!intersects(ports_of(t2.label), n1))
            for (std::size_t q1 = 0; q1 < g1.state_count(); ++q1)
                ts.push_back({pair(q1, t2.source), t2.label, pair(q1, t2.target)});

    return state_graph<Label>(std::move(names), pair(g1.initial(), g2.initial()), std::move(ts));
}

} // namespace detail

/// A1 ⋈ A2 over the full state product Q1 x Q2 (not reachability-pruned).
inline port_automaton pa_product(const port_automaton& a1, const port_automaton& a2)
{
    auto g = detail::synchronous_product(
        a1.graph(), a1.nodes(), a2.graph(), a2.nodes(), [](const port_set& l) -> const port_set& { return l; },
        [](const port_set& x, const port_set& y) { return set_union(x, y); });
    return {a1.name() + "_x_" + a2.name(), set_union(a1.nodes(), a2.nodes()), std::move(g)};
}

inline constraint_automaton ca_product(const constraint_automaton& a1, const constraint_automaton& a2)
{
    if (a1.domain().values != a2.domain().values)
        throw error(errc::domain_mismatch, "'" + a1.name() + "' and '" + a2.name() + "' use different data domains");
    function_table fns = a1.functions();
    fns.merge(a2.functions());
    auto g = detail::synchronous_product(
        a1.graph(), a1.nodes(), a2.graph(), a2.nodes(), [](const ca_label& l) -> const port_set& { return l.ports; },
        [](const ca_label& x, const ca_label& y) {
            return ca_label{set_union(x.ports, y.ports), dc::conjoin(x.guard, y.guard)};
        });
    return {a1.name() + "_x_" + a2.name(), set_union(a1.nodes(), a2.nodes()), a1.domain(), std::move(fns),
            std::move(g)};
}

inline port_automaton pa_hide(const port_automaton& a, const port_set& ports)
{
    return {a.name(), set_difference(a.nodes(), ports),
            a.graph().relabel([&](const port_set& n) { return set_difference(n, ports); })};
}

/// ∃P(A): labels become (N \ P, ∃P∩N . g); ⊤ guards stay ⊤.
inline constraint_automaton ca_hide(const constraint_automaton& a, const port_set& ports)
{
    auto g = a.graph().relabel([&](const ca_label& l) {
        const auto hidden = set_intersection(l.ports, ports);
        return ca_label{set_difference(l.ports, ports), l.guard.is_top() ? l.guard : dc_hide(l.guard, hidden)};
    });
    return {a.name(), set_difference(a.nodes(), ports), a.domain(), a.functions(), std::move(g)};
}

inline port_automaton reachable_part(const port_automaton& a) { return {a.name(), a.nodes(), a.graph().reachable()}; }

inline constraint_automaton reachable_part(const constraint_automaton& a)
{
    return {a.name(), a.nodes(), a.domain(), a.functions(), a.graph().reachable()};
}

inline port_automaton rename_nodes(const port_automaton& a, const std::map<port_name, port_name>& renaming)
{
    return {a.name(), rename(a.nodes(), renaming),
            a.graph().relabel([&](const port_set& n) { return rename(n, renaming); })};
}

/// f_a: the identity on states and transitions, over the alphabet 2^𝒩.
inline lts interpret_pa(const port_automaton& a)
{
    return lts(alphabet::over_ports(a.nodes()), a.graph().relabel([](const port_set& n) { return label(n); }));
}

/// f_b of a stateless automaton with polarity.
inline lts interpret_ca(const polarized_ca& pa, const enumeration_limits& limits = {})
{
    const auto& a = pa.automaton();
    if (!is_stateless(a))
        throw error(errc::not_stateless, "'" + a.name() + "' is not stateless");
    port_set used;
    for (const auto& t : a.graph().transitions())
        for (const auto& n : t.label.ports) {
            if (pa.mixed().count(n))
                throw error(errc::mixed_nodes_present,
                            "mixed node '" + n + "' occurs on a transition of '" + a.name() + "'; hide it first");
            used.insert(n);
        }
    const port_set two_p = duplicate(base_ports(used));
    std::vector<transition<label>> ts;
    for (const auto& t : a.graph().transitions())
        for (auto& delta : delta_set(t.label.ports, t.label.guard, two_p, a.domain(), a.functions(), limits))
            ts.push_back({0, label(std::move(delta)), 0});
    return lts(alphabet::over_assignments(two_p, a.domain().values),
               state_graph<label>({a.graph().initial_state()}, 0, std::move(ts)));
}

inline constraint_automaton to_constraint_automaton(const port_automaton& a)
{
    return {a.name(), a.nodes(), finite_domain::singleton(), {},
            a.graph().relabel([](const port_set& n) { return ca_label{n, dc::top()}; })};
}

/// Drops guards of a singleton-domain automaton; transitions whose guard is
/// unsatisfiable disappear.
inline port_automaton to_port_automaton(const constraint_automaton& a)
{
    if (!is_port_automaton(a))
        throw error(errc::invalid_model, "'" + a.name() + "' has a non-singleton data domain");
    const datum only = a.domain().values.front();
    auto g = a.graph().relabel([&](const ca_label& l) -> std::optional<port_set> {
        partial_assignment delta;
        for (const auto& p : l.ports)
            delta.emplace(p, only);
        if (!dc_eval(l.guard, delta, a.domain(), a.functions()))
            return std::nullopt;
        return l.ports;
    });
    return {a.name(), a.nodes(), std::move(g)};
}

enum class primitive_kind { sync, lossy_sync, sync_drain, fifo1 };

/// Channel automata of the primitive library. Over a singleton domain every
/// guard is ⊤; otherwise guards carry the data relation of the channel and
/// FIFO1 remembers its buffered datum in the state.
inline constraint_automaton primitive(primitive_kind kind, const port_name& a, const port_name& b,
                                      const finite_domain& dom = finite_domain::singleton())
{
    if (a == b)
        throw error(errc::arity_error, "a channel needs two distinct ends");
    const bool plain = dom.size() == 1;
    const port_set ab{a, b};
    auto copy = plain ? dc::top() : dc::eq_ports(a, b);
    using named = named_transition<ca_label>;
    switch (kind) {
    case primitive_kind::sync:
        return {"Sync", ab, dom, {}, state_graph<ca_label>::from_names({"q"}, "q", {named{"q", {ab, copy}, "q"}})};
    case primitive_kind::lossy_sync:
        return {"LossySync", ab, dom, {},
                state_graph<ca_label>::from_names(
                    {"q"}, "q", {named{"q", {ab, copy}, "q"}, named{"q", {{a}, dc::top()}, "q"}})};
    case primitive_kind::sync_drain:
        return {"SyncDrain", ab, dom, {},
                state_graph<ca_label>::from_names({"q"}, "q", {named{"q", {ab, dc::top()}, "q"}})};
    case primitive_kind::fifo1: {
        if (plain)
            return {"FIFO1", ab, dom, {},
                    state_graph<ca_label>::from_names({"q0", "q1"}, "q0",
                                                      {named{"q0", {{a}, dc::top()}, "q1"},
                                                       named{"q1", {{b}, dc::top()}, "q0"}})};
        std::vector<state_id> states{"q0"};
        std::vector<named> ts;
        for (auto v : dom.values) {
            const state_id full = "q1_" + std::to_string(v);
            states.push_back(full);
            ts.push_back({"q0", {{a}, dc::eq(a, v)}, full});
            ts.push_back({full, {{b}, dc::eq(b, v)}, "q0"});
        }
        return {"FIFO1", ab, dom, {}, state_graph<ca_label>::from_names(std::move(states), "q0", ts)};
    }
    }
    throw error(errc::arity_error, "unknown primitive");
}

/// Merge-replicate node: each input fires with all outputs at once.
inline constraint_automaton node_primitive(const std::vector<port_name>& inputs, const std::vector<port_name>& outputs,
                                           const finite_domain& dom = finite_domain::singleton())
{
    if (inputs.empty())
        throw error(errc::arity_error, "a node needs at least one input end");
    port_set ins(inputs.begin(), inputs.end());
    port_set outs(outputs.begin(), outputs.end());
    if (ins.size() != inputs.size() || outs.size() != outputs.size() || intersects(ins, outs))
        throw error(errc::arity_error, "node ends must be distinct");
    std::vector<named_transition<ca_label>> ts;
    for (const auto& in : ins) {
        std::vector<data_constraint> copies;
        if (dom.size() > 1)
            for (const auto& o : outs)
                copies.push_back(dc::eq_ports(o, in));
        port_set fired = outs;
        fired.insert(in);
        ts.push_back({"q", {std::move(fired), dc::all_of(std::move(copies))}, "q"});
    }
    return {"Node", set_union(ins, outs), dom, {}, state_graph<ca_label>::from_names({"q"}, "q", ts)};
}

} // namespace coordbridge
