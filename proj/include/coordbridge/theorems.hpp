#pragma once

#include "bip.hpp"
#include "interaction.hpp"
#include "lts.hpp"
#include "reo.hpp"
#include "translate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coordbridge {

enum class verdict_outcome { holds, fails, precondition_violated };

inline std::string to_string(verdict_outcome o)
{
    switch (o) {
    case verdict_outcome::holds: return "holds";
    case verdict_outcome::fails: return "fails";
    case verdict_outcome::precondition_violated: return "precondition-violated";
    }
    return "unknown";
}

/// Outcome of one theorem instance: a witness relation when a bisimilarity
/// holds, or the precondition violations that stopped the check.
struct theorem_verdict {
    std::string statement;
    verdict_outcome outcome = verdict_outcome::holds;
    std::optional<bisimulation_witness> witness;
    std::vector<std::string> violations;
    std::string detail;
    std::size_t delta_checks = 0;  // per-transition Δ comparisons (data-sensitive checks)

    [[nodiscard]] bool holds() const { return outcome == verdict_outcome::holds; }
};

namespace detail {

inline theorem_verdict compare(std::string statement, const lts& left, const lts& right)
{
    theorem_verdict v;
    v.statement = std::move(statement);
    const auto cmp = compare_bisimulation(left, right);
    if (cmp.outcome == bisim_outcome::bisimilar) {
        v.witness = cmp.witness;
        v.detail = std::to_string(left.state_count()) + " vs " + std::to_string(right.state_count()) + " states";
    }
    else {
        v.outcome = verdict_outcome::fails;
        v.detail = cmp.outcome == bisim_outcome::alphabet_mismatch
                       ? "alphabets differ: " + to_string(left.alpha()) + " vs " + to_string(right.alpha())
                       : "not bisimilar";
    }
    return v;
}

inline theorem_verdict rejected(std::string statement, std::vector<std::string> violations)
{
    theorem_verdict v;
    v.statement = std::move(statement);
    v.outcome = verdict_outcome::precondition_violated;
    v.violations = std::move(violations);
    v.detail = "input outside the theorem's class";
    return v;
}

} // namespace detail

/// g_a(BIP_a(A)) ≅ f_a(A) for A ∈ PA′.
inline theorem_verdict check_theorem1_pa(const port_automaton& a, const enumeration_limits& limits = {})
{
    const std::string statement = "g_a(BIP_a(" + a.name() + ")) ~ f_a(" + a.name() + ")";
    if (auto r = in_pa_prime(a); !r.member)
        return detail::rejected(statement, r.violations);
    const auto arch = bip_a(a, {}, limits).arch;
    return detail::compare(statement, interpret_arch(arch, {false, limits}), interpret_pa(a));
}

/// f_a(Reo_a(A)) ≅ g_a(A) for A ∈ Arch′.
inline theorem_verdict check_theorem1_arch(const bip_architecture& arch, const enumeration_limits& limits = {})
{
    const std::string statement = "f_a(Reo_a(" + arch.name() + ")) ~ g_a(" + arch.name() + ")";
    if (auto r = in_arch_prime(arch); !r.member)
        return detail::rejected(statement, r.violations);
    return detail::compare(statement, interpret_pa(reo_a(arch)), interpret_arch(arch, {false, limits}));
}

/// A_γ12 ~ A_γ1 ⋈ A_γ2 when P_C1 ∩ P_C2 = ∅ and ∅ ∈ γ1 ∩ γ2.
inline theorem_verdict check_lemma1(const bip_architecture& a1, const bip_architecture& a2)
{
    const std::string statement = "A_gamma12 ~ A_gamma1 x A_gamma2 for " + a1.name() + ", " + a2.name();
    std::vector<std::string> violations;
    if (auto s = set_intersection(a1.coordinator_ports(), a2.coordinator_ports()); !s.empty())
        violations.push_back("coordinator ports overlap: " + to_string(s));
    if (!a1.gamma().count({}))
        violations.push_back("empty interaction missing from " + a1.name());
    if (!a2.gamma().count({}))
        violations.push_back("empty interaction missing from " + a2.name());
    if (!violations.empty())
        return detail::rejected(statement, violations);
    const auto composed = arch_compose(a1, a2);
    return detail::compare(statement, interpret_pa(gamma_automaton(composed.gamma(), composed.interface())),
                           interpret_pa(pa_product(gamma_automaton(a1.gamma(), a1.interface()),
                                                   gamma_automaton(a2.gamma(), a2.interface()))));
}

/// Reo_a(A1 ⊕ A2) ~ Reo_a(A1) ⋈ Reo_a(A2) under the side conditions.
inline theorem_verdict check_theorem2(const bip_architecture& a1, const bip_architecture& a2)
{
    const std::string statement = "Reo_a(" + a1.name() + " + " + a2.name() + ") ~ Reo_a(" + a1.name() +
                                  ") x Reo_a(" + a2.name() + ")";
    std::vector<std::string> violations;
    for (const auto* a : {&a1, &a2})
        for (auto& v : in_arch_prime(*a).violations)
            violations.push_back(std::move(v));
    for (auto& v : composition_side_conditions(a1, a2))
        violations.push_back(std::move(v));
    if (!violations.empty())
        return detail::rejected(statement, violations);
    return detail::compare(statement, interpret_pa(reo_a(arch_compose(a1, a2))),
                           interpret_pa(pa_product(reo_a(a1), reo_a(a2))));
}

/// BIP_a(A1 ⋈ A2) ~ BIP_a(A1) ⊕ BIP_a(A2) for A1, A2 ∈ PA′. The second
/// translation primes away from every name the first one uses.
inline theorem_verdict check_theorem3(const port_automaton& p1, const port_automaton& p2,
                                      const enumeration_limits& limits = {})
{
    const std::string statement = "BIP_a(" + p1.name() + " x " + p2.name() + ") ~ BIP_a(" + p1.name() +
                                  ") + BIP_a(" + p2.name() + ")";
    std::vector<std::string> violations;
    for (const auto* a : {&p1, &p2})
        for (auto& v : in_pa_prime(*a).violations)
            violations.push_back(a->name() + ": " + v);
    if (!violations.empty())
        return detail::rejected(statement, violations);
    const auto first = bip_a(p1, p2.nodes(), limits).arch;
    const auto second = bip_a(p2, set_union(first.interface(), p1.nodes()), limits).arch;
    const auto joint = bip_a(pa_product(p1, p2), {}, limits).arch;
    return detail::compare(statement, interpret_arch(arch_compose(first, second), {false, limits}),
                           interpret_arch(joint, {false, limits}));
}

namespace detail {

inline std::string describe_difference(const std::vector<assignment>& a, const std::vector<assignment>& b)
{
    std::vector<assignment> only_a, only_b;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
    std::string out = std::to_string(only_a.size()) + " vs " + std::to_string(only_b.size()) + " unmatched";
    if (!only_a.empty())
        out += "; e.g. " + to_string(only_a.front());
    else if (!only_b.empty())
        out += "; e.g. " + to_string(only_b.front());
    return out;
}

} // namespace detail

/// g_b(BIP_b(A)) = f_b(∃𝒩_mix A), plus Δ(α(N,g)) = Δ(N,g) per transition.
inline theorem_verdict check_theorem4_ca(const polarized_ca& a, const enumeration_limits& limits = {})
{
    theorem_verdict v;
    v.statement = "g_b(BIP_b(" + a.automaton().name() + ")) = f_b(" + a.automaton().name() + ")";
    if (!is_stateless(a.automaton()))
        return detail::rejected(v.statement, {"automaton is not stateless"});
    const auto hidden = hide_mixed(a);
    const auto model = bip_b(a, limits);
    const auto left = interpret_im(model, limits);
    const auto right = interpret_ca(hidden, limits);
    const port_set two_p = duplicate(model.ports());
    const auto& ca = hidden.automaton();
    for (const auto& t : ca.graph().transitions()) {
        const auto alpha = connector_for(t.label, hidden, limits);
        const auto expected = delta_set(t.label.ports, t.label.guard, two_p, ca.domain(), ca.functions(), limits);
        const auto actual = delta_alpha(alpha, model, limits);
        ++v.delta_checks;
        if (expected != actual) {
            v.outcome = verdict_outcome::fails;
            v.detail = "Delta(alpha(N,g)) != Delta(N,g) for " + to_string(t.label) + ": " +
                       detail::describe_difference(actual, expected);
            return v;
        }
    }
    if (!lts_identical(left, right)) {
        v.outcome = verdict_outcome::fails;
        v.detail = "interpretations differ";
        return v;
    }
    v.detail = std::to_string(left.transitions().size()) + " transitions on both sides";
    return v;
}

/// f_b(Reo_b(Γ)) = g_b(Γ), plus Δ(N(α),g(α)) = Δ(α) per connector.
inline theorem_verdict check_theorem4_im(const interaction_model& model, const enumeration_limits& limits = {})
{
    theorem_verdict v;
    v.statement = "f_b(Reo_b(" + model.name() + ")) = g_b(" + model.name() + ")";
    const auto automaton = reo_b(model, limits);
    const auto left = interpret_ca(automaton, limits);
    const auto right = interpret_im(model, limits);
    const port_set two_p = duplicate(model.ports());
    const auto domain = model.domain();
    for (const auto& alpha : model.connectors()) {
        const auto expected = delta_alpha(alpha, model, limits);
        const auto actual =
            delta_set(firing_nodes(alpha), guard_for(alpha, model, limits), two_p, domain, {}, limits);
        ++v.delta_checks;
        if (expected != actual) {
            v.outcome = verdict_outcome::fails;
            v.detail = "Delta(N(alpha),g(alpha)) != Delta(alpha) for top " + alpha.top() + ": " +
                       detail::describe_difference(actual, expected);
            return v;
        }
    }
    if (!lts_identical(left, right)) {
        v.outcome = verdict_outcome::fails;
        v.detail = "interpretations differ: " + to_string(left.alpha()) + " vs " + to_string(right.alpha());
        return v;
    }
    v.detail = std::to_string(left.transitions().size()) + " transitions on both sides";
    return v;
}

} // namespace coordbridge
