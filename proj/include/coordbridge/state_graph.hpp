#pragma once

#include "error.hpp"
#include "ports.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace coordbridge {

using state_id = std::string;

template <class Label>
struct transition {
    std::size_t source = 0;
    Label label{};
    std::size_t target = 0;

    friend bool operator==(const transition&, const transition&) = default;
    friend bool operator<(const transition& a, const transition& b)
    {
        return std::tie(a.source, a.label, a.target) < std::tie(b.source, b.label, b.target);
    }
};

template <class Label>
struct named_transition {
    state_id source;
    Label label;
    state_id target;
};

/// Finite labeled graph with one initial state. States are kept sorted by name
/// and transitions sorted and deduplicated, so equal graphs compare equal
/// regardless of construction order.
template <class Label>
class state_graph {
public:
    using label_type = Label;
    using transition_type = transition<Label>;

    state_graph() : state_graph(std::vector<state_id>{"q"}, 0, {}) {}

    state_graph(std::vector<state_id> states, std::size_t initial, std::vector<transition_type> transitions)
    {
        if (states.empty())
            throw error(errc::invalid_model, "a state graph needs at least one state");
        if (initial >= states.size())
            throw error(errc::invalid_model, "initial state index out of range");
        for (const auto& t : transitions)
            if (t.source >= states.size() || t.target >= states.size())
                throw error(errc::invalid_model, "transition endpoint out of range");

        std::vector<std::size_t> order(states.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return states[a] < states[b]; });
        std::vector<std::size_t> position(states.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            position[order[i]] = i;

        states_.reserve(states.size());
        for (std::size_t i : order)
            states_.push_back(std::move(states[i]));
        for (std::size_t i = 1; i < states_.size(); ++i)
            if (states_[i] == states_[i - 1])
                throw error(errc::invalid_model, "duplicate state '" + states_[i] + "'");

        initial_ = position[initial];
        for (auto& t : transitions) {
            t.source = position[t.source];
            t.target = position[t.target];
        }
        std::sort(transitions.begin(), transitions.end());
        transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
        transitions_ = std::move(transitions);

        offsets_.assign(states_.size() + 1, 0);
        for (const auto& t : transitions_)
            ++offsets_[t.source + 1];
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    }

    static state_graph from_names(std::vector<state_id> states, const state_id& initial,
                                  const std::vector<named_transition<Label>>& transitions)
    {
        std::unordered_map<state_id, std::size_t> index;
        for (std::size_t i = 0; i < states.size(); ++i)
            index.emplace(states[i], i);
        auto lookup = [&](const state_id& s) {
            auto it = index.find(s);
            if (it == index.end())
                throw error(errc::invalid_model, "unknown state '" + s + "'");
            return it->second;
        };
        std::vector<transition_type> ts;
        ts.reserve(transitions.size());
        for (const auto& t : transitions)
            ts.push_back({lookup(t.source), t.label, lookup(t.target)});
        const std::size_t init = lookup(initial);
        return state_graph(std::move(states), init, std::move(ts));
    }

    [[nodiscard]] const std::vector<state_id>& states() const { return states_; }
    [[nodiscard]] std::size_t state_count() const { return states_.size(); }
    [[nodiscard]] std::size_t initial() const { return initial_; }
    [[nodiscard]] const state_id& initial_state() const { return states_[initial_]; }
    [[nodiscard]] const state_id& name(std::size_t s) const { return states_[s]; }
    [[nodiscard]] const std::vector<transition_type>& transitions() const { return transitions_; }

    [[nodiscard]] std::span<const transition_type> outgoing(std::size_t s) const
    {
        return {transitions_.data() + offsets_[s], offsets_[s + 1] - offsets_[s]};
    }

    [[nodiscard]] std::optional<std::size_t> find(const state_id& name) const
    {
        auto it = std::lower_bound(states_.begin(), states_.end(), name);
        if (it == states_.end() || *it != name)
            return std::nullopt;
        return static_cast<std::size_t>(it - states_.begin());
    }

    [[nodiscard]] std::vector<bool> reachable_mask() const
    {
        std::vector<bool> seen(states_.size(), false);
        std::deque<std::size_t> queue{initial_};
        seen[initial_] = true;
        while (!queue.empty()) {
            const auto s = queue.front();
            queue.pop_front();
            for (const auto& t : outgoing(s))
                if (!seen[t.target]) {
                    seen[t.target] = true;
                    queue.push_back(t.target);
                }
        }
        return seen;
    }

    [[nodiscard]] state_graph reachable() const
    {
        const auto seen = reachable_mask();
        std::vector<std::size_t> remap(states_.size(), 0);
        std::vector<state_id> kept;
        for (std::size_t s = 0; s < states_.size(); ++s)
            if (seen[s]) {
                remap[s] = kept.size();
                kept.push_back(states_[s]);
            }
        std::vector<transition_type> ts;
        for (const auto& t : transitions_)
            if (seen[t.source])
                ts.push_back({remap[t.source], t.label, remap[t.target]});
        return state_graph(std::move(kept), remap[initial_], std::move(ts));
    }

    /// Same states; each label replaced by `f(label)`. Labels mapped to
    /// std::nullopt drop their transition when `f` returns an optional.
    template <class F>
    [[nodiscard]] auto relabel(F f) const
    {
        using result = std::invoke_result_t<F, const Label&>;
        if constexpr (is_optional<result>::value) {
            using out_label = typename result::value_type;
            std::vector<transition<out_label>> ts;
            for (const auto& t : transitions_)
                if (auto l = f(t.label))
                    ts.push_back({t.source, std::move(*l), t.target});
            return state_graph<out_label>(states_, initial_, std::move(ts));
        }
        else {
            std::vector<transition<result>> ts;
            ts.reserve(transitions_.size());
            for (const auto& t : transitions_)
                ts.push_back({t.source, f(t.label), t.target});
            return state_graph<result>(states_, initial_, std::move(ts));
        }
    }

    [[nodiscard]] state_graph rename_states(const std::vector<state_id>& names) const
    {
        return state_graph(names, initial_, transitions_);
    }

    friend bool operator==(const state_graph& a, const state_graph& b)
    {
        return a.states_ == b.states_ && a.initial_ == b.initial_ && a.transitions_ == b.transitions_;
    }

private:
    template <class T>
    struct is_optional : std::false_type {};
    template <class T>
    struct is_optional<std::optional<T>> : std::true_type {};

    std::vector<state_id> states_;
    std::size_t initial_ = 0;
    std::vector<transition_type> transitions_;
    std::vector<std::size_t> offsets_;
};

/// Tuple state name "(a,b,c)" used for products and architecture application.
inline state_id tuple_name(const std::vector<std::string>& parts)
{
    return "(" + join(parts, ",") + ")";
}

/// Splits a tuple state name into its leaves: "((0,0),0)" -> {0,0,0}.
inline std::vector<std::string> tuple_leaves(std::string_view name)
{
    std::vector<std::string> leaves;
    std::string current;
    int depth = 0;
    bool any_paren = false;
    for (char c : name) {
        if (c == '(') {
            ++depth;
            any_paren = true;
        }
        else if (c == ')') {
            --depth;
        }
        else if (c == ',' && depth > 0) {
            if (!current.empty())
                leaves.push_back(current);
            current.clear();
        }
        else {
            current += c;
        }
    }
    if (!current.empty() || !any_paren)
        leaves.push_back(current);
    return leaves;
}

/// Flattens nested tuple names left by repeated binary products, so
/// ((a,b),c) becomes (a,b,c).
template <class Label>
state_graph<Label> flatten_state_names(const state_graph<Label>& g)
{
    std::vector<state_id> names;
    names.reserve(g.state_count());
    for (const auto& s : g.states()) {
        auto leaves = tuple_leaves(s);
        names.push_back(leaves.size() == 1 && s.find('(') == std::string::npos ? s : tuple_name(leaves));
    }
    return g.rename_states(names);
}

} // namespace coordbridge
