#pragma once

#include "data_constraint.hpp"
#include "error.hpp"
#include "lts.hpp"
#include "ports.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace coordbridge {

/// Right-hand side of a functional transfer: x_p, a constant, or f(x_p, ...).
struct term {
    enum class kind { variable, constant, call };

    kind type = kind::constant;
    port_name variable;
    datum constant = 0;
    std::string function;
    std::vector<port_name> args;

    static term var(port_name p) { return {kind::variable, std::move(p), 0, {}, {}}; }
    static term lit(datum v) { return {kind::constant, {}, v, {}, {}}; }
    static term call(std::string f, std::vector<port_name> args) { return {kind::call, {}, 0, std::move(f), std::move(args)}; }

    [[nodiscard]] port_set reads() const
    {
        if (type == kind::variable)
            return {variable};
        return {args.begin(), args.end()};
    }

    friend bool operator==(const term&, const term&) = default;
};

inline std::string to_string(const term& t)
{
    switch (t.type) {
    case term::kind::variable: return t.variable;
    case term::kind::constant: return std::to_string(t.constant);
    case term::kind::call: return t.function + "(" + join(t.args, ",") + ")";
    }
    return {};
}

/// x_1 := t_1, ..., x_n := t_n, evaluated simultaneously.
struct assignment_transfer {
    std::vector<std::pair<port_name, term>> assigns;

    friend bool operator==(const assignment_transfer&, const assignment_transfer&) = default;
};

/// Extensional transfer: a relation from input tuples to output tuples.
struct table_transfer {
    std::vector<port_name> inputs;
    std::vector<port_name> outputs;
    std::set<std::pair<std::vector<datum>, std::vector<datum>>> rows;

    friend bool operator==(const table_transfer&, const table_transfer&) = default;
};

using data_transfer = std::variant<assignment_transfer, table_transfer>;

inline port_set transfer_reads(const data_transfer& t)
{
    if (const auto* a = std::get_if<assignment_transfer>(&t)) {
        port_set out;
        for (const auto& [target, rhs] : a->assigns) {
            auto r = rhs.reads();
            out.insert(r.begin(), r.end());
        }
        return out;
    }
    const auto& tab = std::get<table_transfer>(t);
    return {tab.inputs.begin(), tab.inputs.end()};
}

inline port_set transfer_writes(const data_transfer& t)
{
    if (const auto* a = std::get_if<assignment_transfer>(&t)) {
        port_set out;
        for (const auto& [target, rhs] : a->assigns)
            out.insert(target);
        return out;
    }
    const auto& tab = std::get<table_transfer>(t);
    return {tab.outputs.begin(), tab.outputs.end()};
}

/// All outcomes of a transfer on `in`; an empty result means undefined.
inline std::vector<partial_assignment> apply_transfer(const data_transfer& t, const partial_assignment& in,
                                                      const function_table& fns)
{
    auto read = [&](const port_name& p) -> datum {
        auto it = in.find(p);
        if (it == in.end())
            throw error(errc::unbound_port, "transfer reads '" + p + "' which has no value");
        return it->second;
    };
    if (const auto* a = std::get_if<assignment_transfer>(&t)) {
        partial_assignment out;
        for (const auto& [target, rhs] : a->assigns) {
            switch (rhs.type) {
            case term::kind::variable: out[target] = read(rhs.variable); break;
            case term::kind::constant: out[target] = rhs.constant; break;
            case term::kind::call: {
                std::vector<datum> args;
                for (const auto& p : rhs.args)
                    args.push_back(read(p));
                auto v = fns.apply(rhs.function, args);
                if (!v)
                    return {};
                out[target] = *v;
                break;
            }
            }
        }
        return {out};
    }
    const auto& tab = std::get<table_transfer>(t);
    std::vector<datum> key;
    for (const auto& p : tab.inputs)
        key.push_back(read(p));
    std::vector<partial_assignment> outs;
    for (auto it = tab.rows.lower_bound({key, {}}); it != tab.rows.end() && it->first == key; ++it) {
        partial_assignment out;
        for (std::size_t i = 0; i < tab.outputs.size(); ++i)
            out[tab.outputs[i]] = it->second[i];
        outs.push_back(std::move(out));
    }
    return outs;
}

inline bool is_functional(const data_transfer& t)
{
    const auto* tab = std::get_if<table_transfer>(&t);
    if (!tab)
        return true;
    for (auto it = tab->rows.begin(); it != tab->rows.end(); ++it) {
        auto next = std::next(it);
        if (next != tab->rows.end() && next->first == it->first)
            return false;
    }
    return true;
}

/// (top <- bottom).[guard : up // down] with local variables.
struct interaction_expression {
    port_set top;
    port_set bottom;
    port_set locals;
    data_constraint guard;
    data_transfer up = assignment_transfer{};
    data_transfer down = assignment_transfer{};

    [[nodiscard]] port_set support() const { return set_union(top, bottom); }

    friend bool operator==(const interaction_expression&, const interaction_expression&) = default;
};

/// An interaction expression that passed validate_simple.
class simple_connector {
public:
    [[nodiscard]] const interaction_expression& expression() const { return expr_; }
    [[nodiscard]] const port_name& top() const { return *expr_.top.begin(); }
    [[nodiscard]] const port_set& bottom() const { return expr_.bottom; }
    [[nodiscard]] const port_set& locals() const { return expr_.locals; }
    [[nodiscard]] const data_constraint& guard() const { return expr_.guard; }
    [[nodiscard]] const data_transfer& up() const { return expr_.up; }
    [[nodiscard]] const data_transfer& down() const { return expr_.down; }

    /// Bottom ports that receive a value upward: read by the guard or up.
    [[nodiscard]] port_set upward_ports() const
    {
        return set_intersection(set_union(free_ports(expr_.guard), transfer_reads(expr_.up)), expr_.bottom);
    }
    /// Bottom ports assigned by the downward transfer.
    [[nodiscard]] port_set downward_ports() const { return transfer_writes(expr_.down); }

    friend bool operator==(const simple_connector&, const simple_connector&) = default;

private:
    friend simple_connector validate_simple(interaction_expression alpha);
    explicit simple_connector(interaction_expression e) : expr_(std::move(e)) {}
    interaction_expression expr_;
};

inline std::vector<std::string> simple_violations(const interaction_expression& alpha)
{
    std::vector<std::string> reasons;
    if (alpha.top.size() != 1) {
        reasons.push_back("needs exactly one top port, has " + std::to_string(alpha.top.size()));
        return reasons;
    }
    const port_name& w = *alpha.top.begin();
    for (const auto& p : set_union(set_union(alpha.top, alpha.bottom), alpha.locals))
        if (!is_valid_port_name(p))
            reasons.push_back("invalid port name '" + p + "'");
    if (alpha.bottom.count(w))
        reasons.push_back("top port '" + w + "' is also a bottom port");
    if (alpha.locals.count(w) || intersects(alpha.locals, alpha.bottom))
        reasons.push_back("local variables must differ from the top and bottom ports");
    if (auto extra = set_difference(free_ports(alpha.guard), alpha.bottom); !extra.empty())
        reasons.push_back("guard reads " + to_string(extra) + " outside the bottom ports");
    if (auto extra = set_difference(transfer_reads(alpha.up), alpha.bottom); !extra.empty())
        reasons.push_back("up reads " + to_string(extra) + " outside the bottom ports");
    port_set up_targets = alpha.locals;
    up_targets.insert(w);
    const auto up_writes = transfer_writes(alpha.up);
    if (auto extra = set_difference(up_writes, up_targets); !extra.empty())
        reasons.push_back("up writes " + to_string(extra) + " outside the top port and locals");
    if (auto extra = set_difference(transfer_reads(alpha.down), up_writes); !extra.empty())
        reasons.push_back("down reads " + to_string(extra) + " which up does not write");
    if (auto extra = set_difference(transfer_writes(alpha.down), alpha.bottom); !extra.empty())
        reasons.push_back("down writes " + to_string(extra) + " outside the bottom ports");
    if (!is_functional(alpha.down))
        reasons.push_back("down table is not a function");
    return reasons;
}

inline simple_connector validate_simple(interaction_expression alpha)
{
    const auto reasons = simple_violations(alpha);
    if (!reasons.empty())
        throw error(errc::not_simple, join(reasons, "; "));
    return simple_connector(std::move(alpha));
}

/// A data-aware BIP interaction model Γ.
class interaction_model {
public:
    interaction_model() = default;

    interaction_model(std::string name, finite_domain default_domain, std::map<port_name, finite_domain> port_domains,
                      function_table functions, std::vector<simple_connector> connectors)
        : name_(std::move(name)), default_domain_(std::move(default_domain)), port_domains_(std::move(port_domains)),
          functions_(std::move(functions)), connectors_(std::move(connectors))
    {
        port_set tops;
        for (const auto& c : connectors_) {
            if (!tops.insert(c.top()).second)
                throw error(errc::invalid_model, "top port '" + c.top() + "' occurs in more than one connector");
            check_functions(c);
        }
        for (const auto& c : connectors_)
            for (const auto& p : c.bottom())
                check_bidirectional_name(p);
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const finite_domain& default_domain() const { return default_domain_; }
    [[nodiscard]] const std::map<port_name, finite_domain>& port_domains() const { return port_domains_; }
    [[nodiscard]] const function_table& functions() const { return functions_; }
    [[nodiscard]] const std::vector<simple_connector>& connectors() const { return connectors_; }

    [[nodiscard]] const finite_domain& domain_of(const port_name& p) const
    {
        auto it = port_domains_.find(p);
        return it == port_domains_.end() ? default_domain_ : it->second;
    }

    /// P_Γ: the union of all bottom ports.
    [[nodiscard]] port_set ports() const
    {
        port_set out;
        for (const auto& c : connectors_)
            out.insert(c.bottom().begin(), c.bottom().end());
        return out;
    }

    /// D_Γ: the union of the port domains over P_Γ.
    [[nodiscard]] finite_domain domain() const
    {
        const auto ps = ports();
        if (ps.empty())
            return default_domain_;
        std::vector<datum> values;
        for (const auto& p : ps) {
            const auto& d = domain_of(p);
            values.insert(values.end(), d.values.begin(), d.values.end());
        }
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        return finite_domain{default_domain_.name, std::move(values)};
    }

    friend bool operator==(const interaction_model&, const interaction_model&) = default;

private:
    void check_functions(const simple_connector& c) const
    {
        auto check_term = [&](const data_transfer& t) {
            if (const auto* a = std::get_if<assignment_transfer>(&t))
                for (const auto& [target, rhs] : a->assigns)
                    if (rhs.type == term::kind::call && !functions_.contains(rhs.function))
                        throw error(errc::unknown_function, "function '" + rhs.function + "' is not declared");
        };
        check_term(c.up());
        check_term(c.down());
        check_guard(c.guard());
    }

    void check_guard(const data_constraint& g) const
    {
        if (g.type() == dc::kind::fun_eq && !functions_.contains(g.get().function))
            throw error(errc::unknown_function, "function '" + g.get().function + "' is not declared");
        for (const auto& c : g.children())
            check_guard(c);
    }

    std::string name_ = "Gamma";
    finite_domain default_domain_ = finite_domain::singleton();
    std::map<port_name, finite_domain> port_domains_;
    function_table functions_;
    std::vector<simple_connector> connectors_;
};

/// Δ(α) over 2P_Γ. Non-void exactly on N(α): p* for ports read upward and
/// p_* for ports written downward. Up is a relation; δ_dn must equal down
/// applied to at least one up outcome.
inline std::vector<assignment> delta_alpha(const simple_connector& alpha, const interaction_model& model,
                                           const enumeration_limits& limits = {})
{
    const port_set two_p = duplicate(model.ports());
    const finite_domain d_gamma = model.domain();
    const auto& fns = model.functions();
    const std::vector<port_name> readers = [&] {
        auto r = alpha.upward_ports();
        return std::vector<port_name>(r.begin(), r.end());
    }();
    const port_set writers = alpha.downward_ports();

    std::set<assignment> out;
    detail::binding_stack env;
    detail::enumerate_assignments(readers, d_gamma, env, limits, [&](const std::vector<datum>& values) {
        partial_assignment up_in;
        for (std::size_t i = 0; i < readers.size(); ++i) {
            if (!model.domain_of(readers[i]).contains(values[i]))
                return;
            up_in.emplace(readers[i], values[i]);
        }
        if (!dc_eval(alpha.guard(), up_in, d_gamma, fns))
            return;
        for (const auto& up_out : apply_transfer(alpha.up(), up_in, fns))
            for (const auto& down_out : apply_transfer(alpha.down(), up_out, fns)) {
                bool typed = true;
                for (const auto& [p, v] : down_out)
                    typed = typed && model.domain_of(p).contains(v);
                if (!typed)
                    continue;
                assignment delta;
                for (const auto& p : two_p)
                    delta.emplace(p, std::nullopt);
                for (const auto& [p, v] : up_in)
                    delta[source_port(p)] = v;
                for (const auto& p : writers)
                    delta[sink_port(p)] = down_out.at(p);
                out.insert(std::move(delta));
            }
    });
    return {out.begin(), out.end()};
}

/// g_b: a single state with one self-loop per δ ∈ Δ(α), α ∈ Γ.
inline lts interpret_im(const interaction_model& model, const enumeration_limits& limits = {})
{
    std::vector<transition<label>> ts;
    for (const auto& alpha : model.connectors())
        for (auto& delta : delta_alpha(alpha, model, limits))
            ts.push_back({0, label(std::move(delta)), 0});
    return lts(alphabet::over_assignments(duplicate(model.ports()), model.domain().values),
               state_graph<label>({"q"}, 0, std::move(ts)));
}

} // namespace coordbridge
