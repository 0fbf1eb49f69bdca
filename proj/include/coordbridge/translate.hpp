#pragma once

#include "bip.hpp"
#include "data_constraint.hpp"
#include "error.hpp"
#include "interaction.hpp"
#include "reo.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace coordbridge {

// ---- data-agnostic: architectures and port automata ----

/// A_γ: one state q with a self-loop per interaction.
inline port_automaton gamma_automaton(const interaction_set& gamma, const port_set& ports,
                                      const std::string& name = "A_gamma")
{
    std::vector<transition<port_set>> ts;
    for (const auto& n : gamma) {
        if (!is_subset(n, ports))
            throw error(errc::interaction_out_of_interface,
                        "interaction " + to_string(n) + " is not within " + to_string(ports));
        ts.push_back({0, n, 0});
    }
    return {name, ports, state_graph<port_set>({"q"}, 0, std::move(ts))};
}

inline port_automaton as_port_automaton(const bip_component& c) { return {c.name(), c.ports(), c.graph()}; }

inline bip_component as_component(const port_automaton& a) { return {a.name(), a.nodes(), a.graph()}; }

/// Reo_a(A) = ∃P_C (C1 ⋈ ... ⋈ Cn ⋈ A_γ), folded from the left.
inline port_automaton reo_a(const bip_architecture& arch)
{
    auto a_gamma = gamma_automaton(arch.gamma(), arch.interface());
    if (arch.coordinators().empty())
        return a_gamma.renamed("Reo_a(" + arch.name() + ")");
    port_automaton acc = as_port_automaton(arch.coordinators().front());
    for (std::size_t i = 1; i < arch.coordinators().size(); ++i)
        acc = pa_product(acc, as_port_automaton(arch.coordinators()[i]));
    acc = pa_hide(pa_product(acc, a_gamma), arch.coordinator_ports());
    return acc.renamed("Reo_a(" + arch.name() + ")");
}

struct bip_a_result {
    bip_architecture arch;
    std::map<port_name, port_name> renaming;  // n -> n'
};

/// BIP_a(A) = ({C}, 𝒩 ∪ 𝒩', {N ∪ N' | N ⊆ 𝒩}). The prime suffix grows
/// until no primed name clashes with 𝒩 or `avoid`.
inline bip_a_result bip_a(const port_automaton& a, const port_set& avoid = {}, const enumeration_limits& limits = {})
{
    check_port_count(a.nodes().size(), limits, "BIP_a interaction model");
    const port_set taken = set_union(a.nodes(), avoid);
    std::map<port_name, port_name> renaming;
    for (std::string suffix = "'"; renaming.empty(); suffix += "'") {
        if (suffix.size() > 8)
            throw error(errc::prime_collision, "no free primed copy of the nodes of '" + a.name() + "'");
        bool clash = false;
        for (const auto& n : a.nodes())
            clash = clash || taken.count(n + suffix);
        if (clash)
            continue;
        for (const auto& n : a.nodes())
            renaming.emplace(n, n + suffix);
        if (a.nodes().empty())
            break;
    }
    const port_set primed = rename(a.nodes(), renaming);
    bip_component coordinator("C_" + a.name(), primed,
                              a.graph().relabel([&](const port_set& n) { return rename(n, renaming); }));
    interaction_set gamma;
    for (const auto& n : powerset(a.nodes(), limits))
        gamma.insert(set_union(n, rename(n, renaming)));
    return {bip_architecture("BIP_a(" + a.name() + ")", {std::move(coordinator)}, set_union(a.nodes(), primed),
                             std::move(gamma)),
            std::move(renaming)};
}

enum class model_class { pa_prime, arch_prime };

struct class_report {
    std::string subject;
    model_class cls = model_class::pa_prime;
    bool member = true;
    std::vector<std::string> violations;
};

inline std::string to_string(model_class c) { return c == model_class::pa_prime ? "PA'" : "Arch'"; }

/// PA′: q -∅-> q′ iff q′ = q.
inline class_report in_pa_prime(const port_automaton& a)
{
    class_report r{a.name(), model_class::pa_prime, true, {}};
    const auto& g = a.graph();
    std::vector<bool> has_loop(g.state_count(), false);
    for (const auto& t : g.transitions()) {
        if (!t.label.empty())
            continue;
        if (t.source == t.target)
            has_loop[t.source] = true;
        else
            r.violations.push_back("empty transition " + g.name(t.source) + " -> " + g.name(t.target) +
                                   " changes state");
    }
    for (std::size_t s = 0; s < g.state_count(); ++s)
        if (!has_loop[s])
            r.violations.push_back("state " + g.name(s) + " has no empty self-loop");
    r.member = r.violations.empty();
    return r;
}

/// Arch′: no coordinator has a state-changing ∅-transition.
inline class_report in_arch_prime(const bip_architecture& arch)
{
    class_report r{arch.name(), model_class::arch_prime, true, {}};
    for (const auto& c : arch.coordinators())
        for (const auto& t : c.graph().transitions())
            if (t.label.empty() && t.source != t.target)
                r.violations.push_back("coordinator " + c.name() + " has empty transition " +
                                       c.graph().name(t.source) + " -> " + c.graph().name(t.target));
    r.member = r.violations.empty();
    return r;
}

inline port_automaton add_empty_selfloops(const port_automaton& a)
{
    const auto& g = a.graph();
    std::vector<transition<port_set>> ts = g.transitions();
    for (const auto& t : ts)
        if (t.label.empty() && t.source != t.target)
            throw error(errc::state_changing_empty, "empty transition " + g.name(t.source) + " -> " +
                                                        g.name(t.target) + " cannot be repaired");
    for (std::size_t s = 0; s < g.state_count(); ++s)
        ts.push_back({s, {}, s});
    return {a.name(), a.nodes(), state_graph<port_set>(g.states(), g.initial(), std::move(ts))};
}

/// Side conditions of the composition theorem for Reo_a, as readable
/// violations; empty means they hold.
inline std::vector<std::string> composition_side_conditions(const bip_architecture& a1, const bip_architecture& a2)
{
    std::vector<std::string> out;
    const auto c1 = a1.coordinator_ports();
    const auto c2 = a2.coordinator_ports();
    if (auto s = set_intersection(c1, c2); !s.empty())
        out.push_back("coordinator ports overlap: " + to_string(s));
    if (auto s = set_intersection(c1, a2.interface()); !s.empty())
        out.push_back("coordinator ports of " + a1.name() + " in the interface of " + a2.name() + ": " + to_string(s));
    if (auto s = set_intersection(c2, a1.interface()); !s.empty())
        out.push_back("coordinator ports of " + a2.name() + " in the interface of " + a1.name() + ": " + to_string(s));
    if (!a1.gamma().count({}))
        out.push_back("empty interaction missing from " + a1.name());
    if (!a2.gamma().count({}))
        out.push_back("empty interaction missing from " + a2.name());
    return out;
}

inline port_name fresh_port(const port_set& used, const std::string& stem = "x")
{
    if (!used.count(stem))
        return stem;
    for (unsigned i = 1; i < 1'000'000; ++i)
        if (auto candidate = stem + std::to_string(i); !used.count(candidate))
            return candidate;
    throw error(errc::fresh_name_exhausted, "no fresh name with stem '" + stem + "'");
}

struct decoupled_pair {
    bip_architecture first;
    bip_architecture second;
    std::optional<port_name> fresh;  // unset when nothing had to change
};

/// Repairs p ∈ P_C1 ∩ P_2: A1 gains a dangling x synchronized with p, and
/// A2 uses x instead of p.
inline decoupled_pair decouple_shared_port(const bip_architecture& a1, const bip_architecture& a2, const port_name& p)
{
    if (!a1.coordinator_ports().count(p) || !a2.interface().count(p))
        return {a1, a2, std::nullopt};
    if (a2.coordinator_ports().count(p))
        throw error(errc::coordinator_ports_overlap, "'" + p + "' belongs to coordinators of both architectures");
    port_set used = set_union(a1.interface(), a2.interface());
    for (const auto& c : a2.coordinators())
        used.insert(c.ports().begin(), c.ports().end());
    const port_name x = fresh_port(used);

    interaction_set gamma1;
    for (const auto& n : a1.gamma()) {
        auto m = n;
        if (m.count(p))
            m.insert(x);
        gamma1.insert(std::move(m));
    }
    port_set interface1 = a1.interface();
    interface1.insert(x);

    const std::map<port_name, port_name> swap{{p, x}};
    interaction_set gamma2;
    for (const auto& n : a2.gamma())
        gamma2.insert(rename(n, swap));
    return {bip_architecture(a1.name(), a1.coordinators(), std::move(interface1), std::move(gamma1)),
            bip_architecture(a2.name(), a2.coordinators(), rename(a2.interface(), swap), std::move(gamma2)), x};
}

// ---- data-sensitive: polarized automata and interaction models ----

/// ∃𝒩_mix(A), keeping the polarity partition.
inline polarized_ca hide_mixed(const polarized_ca& a)
{
    return polarized_ca(ca_hide(a.automaton(), a.mixed()));
}

/// Canonical text of a transition label, hashed into top-port names.
inline std::string canonical_label(const ca_label& l) { return to_string(l.ports) + "|" + to_string(l.guard); }

/// α(N,g) for one transition of a mixed-free polarized automaton.
inline simple_connector connector_for(const ca_label& l, const polarized_ca& a, const enumeration_limits& limits = {})
{
    const auto& ca = a.automaton();
    const port_set boundary = set_union(a.sources(), a.sinks());
    const port_set n = l.ports;
    const port_set src = set_intersection(n, a.sources());
    const port_set snk = set_intersection(n, a.sinks());
    const port_set bottom = base_ports(set_intersection(n, boundary));
    const port_name w = fresh_port(bottom, "w" + to_hex(stable_hash(canonical_label(l))));

    // Source values are the bidirectional variables x_p, so p* becomes p.
    std::map<port_name, port_name> to_base;
    for (const auto& p : src)
        to_base.emplace(p, base_port(p));
    const auto projected = dc_hide(l.guard, set_difference(n, a.sources()));
    const auto g_src = rename_free_ports(dc_eliminate_quantifiers(projected, ca.domain(), ca.functions(), limits), to_base);

    port_set taken = set_union(bottom, port_set{w});
    std::map<port_name, port_name> local_of;
    port_set locals;
    for (const auto& p : snk) {
        const auto y = fresh_port(taken, "y_" + base_port(p));
        taken.insert(y);
        locals.insert(y);
        local_of.emplace(p, y);
    }

    table_transfer up;
    for (const auto& p : src)
        up.inputs.push_back(base_port(p));
    for (const auto& p : snk)
        up.outputs.push_back(local_of.at(p));
    for (const auto& sol : dc_solutions(n, l.guard, ca.domain(), ca.functions(), limits)) {
        std::vector<datum> in, out;
        for (const auto& p : src)
            in.push_back(sol.at(p));
        for (const auto& p : snk)
            out.push_back(sol.at(p));
        up.rows.emplace(std::move(in), std::move(out));
    }

    assignment_transfer down;
    for (const auto& p : snk)
        down.assigns.emplace_back(base_port(p), term::var(local_of.at(p)));

    return validate_simple({{w}, bottom, locals, g_src, std::move(up), std::move(down)});
}

/// BIP_b(A): mixed nodes are hidden first, then each transition (N,g)
/// becomes α(N,g).
inline interaction_model bip_b(const polarized_ca& a, const enumeration_limits& limits = {})
{
    if (!is_stateless(a.automaton()))
        throw error(errc::not_stateless, "'" + a.automaton().name() + "' is not stateless");
    const auto hidden = hide_mixed(a);
    std::vector<simple_connector> connectors;
    std::set<port_name> tops;
    for (const auto& t : hidden.automaton().graph().transitions()) {
        auto alpha = connector_for(t.label, hidden, limits);
        if (tops.insert(alpha.top()).second)
            connectors.push_back(std::move(alpha));
    }
    const auto& ca = hidden.automaton();
    return {"BIP_b(" + ca.name() + ")", ca.domain(), {}, ca.functions(), std::move(connectors)};
}

/// N(α): p* for upward ports, p_* for downward ports.
inline port_set firing_nodes(const simple_connector& alpha)
{
    port_set out;
    for (const auto& p : alpha.upward_ports())
        out.insert(source_port(p));
    for (const auto& p : alpha.downward_ports())
        out.insert(sink_port(p));
    return out;
}

/// g(α) materialized as the canonical disjunction of Δ(α) over N(α).
inline data_constraint guard_for(const simple_connector& alpha, const interaction_model& model,
                                 const enumeration_limits& limits = {})
{
    const port_set nodes = firing_nodes(alpha);
    std::vector<partial_assignment> solutions;
    for (const auto& delta : delta_alpha(alpha, model, limits)) {
        partial_assignment s;
        for (const auto& p : nodes)
            s.emplace(p, *delta.at(p));
        solutions.push_back(std::move(s));
    }
    std::sort(solutions.begin(), solutions.end());
    return canonical_disjunction(solutions, nodes, model.domain(), limits);
}

/// Reo_b(Γ): one state, sources (P_Γ)*, sinks (P_Γ)_*, a transition
/// (N(α), g(α)) per connector.
inline polarized_ca reo_b(const interaction_model& model, const enumeration_limits& limits = {})
{
    const port_set ports = model.ports();
    std::vector<transition<ca_label>> ts;
    for (const auto& alpha : model.connectors())
        ts.push_back({0, {firing_nodes(alpha), guard_for(alpha, model, limits)}, 0});
    return polarized_ca(constraint_automaton("Reo_b(" + model.name() + ")", duplicate(ports), model.domain(), {},
                                             state_graph<ca_label>({"q"}, 0, std::move(ts))));
}

} // namespace coordbridge
