#pragma once

#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace coordbridge {

using port_name = std::string;
using port_set = std::set<port_name>;
using datum = std::int64_t;

/// Guards against exponential enumeration. Every operation that walks a
/// powerset or a space of data assignments checks against these bounds.
struct enumeration_limits {
    std::uint64_t max_candidates = 1'000'000;
    unsigned max_ports = 16;
};

inline bool is_port_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '*' || c == '\'';
}

inline bool is_valid_port_name(std::string_view name)
{
    return !name.empty() && std::all_of(name.begin(), name.end(), is_port_char);
}

inline port_set set_union(const port_set& a, const port_set& b)
{
    port_set out = a;
    out.insert(b.begin(), b.end());
    return out;
}

inline port_set set_intersection(const port_set& a, const port_set& b)
{
    port_set out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

inline port_set set_difference(const port_set& a, const port_set& b)
{
    port_set out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

inline bool is_subset(const port_set& sub, const port_set& super)
{
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

inline bool intersects(const port_set& a, const port_set& b)
{
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else
            return true;
    }
    return false;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i != 0)
            out += sep;
        out += parts[i];
    }
    return out;
}

inline std::string to_string(const port_set& ports)
{
    return "{" + join({ports.begin(), ports.end()}, ",") + "}";
}

inline std::string to_string(const std::set<port_set>& interactions)
{
    std::vector<std::string> parts;
    for (const auto& n : interactions)
        parts.push_back(to_string(n));
    return "{" + join(parts, ", ") + "}";
}

inline void check_port_count(std::size_t count, const enumeration_limits& limits, std::string_view what)
{
    if (count > limits.max_ports)
        throw error(errc::domain_too_large, std::string(what) + " over " + std::to_string(count) +
                                                " ports exceeds the bound of " +
                                                std::to_string(limits.max_ports));
}

/// All subsets of `ports`, ordered by the bitmask over the sorted port list.
inline std::vector<port_set> powerset(const port_set& ports, const enumeration_limits& limits = {})
{
    check_port_count(ports.size(), limits, "powerset");
    std::vector<port_name> items(ports.begin(), ports.end());
    std::vector<port_set> out;
    const std::uint64_t count = std::uint64_t{1} << items.size();
    out.reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        port_set subset;
        for (std::size_t i = 0; i < items.size(); ++i)
            if (mask & (std::uint64_t{1} << i))
                subset.insert(items[i]);
        out.push_back(std::move(subset));
    }
    return out;
}

// Duplicated (unidirectional) port naming: p* receives data into the
// connector, p_* delivers data out of it.

enum class polarity { source, sink, mixed };

inline bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline polarity polarity_of(std::string_view node)
{
    if (ends_with(node, "_*"))
        return polarity::sink;
    if (ends_with(node, "*"))
        return polarity::source;
    return polarity::mixed;
}

inline void check_bidirectional_name(const port_name& p)
{
    if (!is_valid_port_name(p) || ends_with(p, "*") || ends_with(p, "_"))
        throw error(errc::invalid_model, "'" + p + "' cannot be used as a bidirectional port name");
}

/// A node is mixed (no '*'), or a bidirectional name plus "*" or "_*".
inline bool is_valid_node_name(std::string_view node)
{
    if (!is_valid_port_name(node))
        return false;
    std::string_view base = node;
    if (ends_with(node, "_*"))
        base.remove_suffix(2);
    else if (ends_with(node, "*"))
        base.remove_suffix(1);
    return !base.empty() && base.find('*') == std::string_view::npos && (base == node || !ends_with(base, "_"));
}

inline port_name source_port(const port_name& p)
{
    check_bidirectional_name(p);
    return p + "*";
}

inline port_name sink_port(const port_name& p)
{
    check_bidirectional_name(p);
    return p + "_*";
}

/// Bidirectional port behind a duplicated node; mixed nodes map to themselves.
inline port_name base_port(std::string_view node)
{
    switch (polarity_of(node)) {
    case polarity::sink: return port_name(node.substr(0, node.size() - 2));
    case polarity::source: return port_name(node.substr(0, node.size() - 1));
    case polarity::mixed: break;
    }
    return port_name(node);
}

inline port_set base_ports(const port_set& nodes)
{
    port_set out;
    for (const auto& n : nodes)
        out.insert(base_port(n));
    return out;
}

/// The duplicated port set 2P = { p*, p_* | p in P }.
inline port_set duplicate(const port_set& ports)
{
    port_set out;
    for (const auto& p : ports) {
        out.insert(source_port(p));
        out.insert(sink_port(p));
    }
    return out;
}

inline port_set with_polarity(const port_set& nodes, polarity pol)
{
    port_set out;
    for (const auto& n : nodes)
        if (polarity_of(n) == pol)
            out.insert(n);
    return out;
}

/// Renames every member present in `renaming`; others pass through.
inline port_set rename(const port_set& ports, const std::map<port_name, port_name>& renaming)
{
    port_set out;
    for (const auto& p : ports) {
        auto it = renaming.find(p);
        out.insert(it == renaming.end() ? p : it->second);
    }
    return out;
}

/// 64-bit FNV-1a; used for stable generated names.
inline std::uint64_t stable_hash(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v, int digits = 16)
{
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(static_cast<std::size_t>(digits), '0');
    for (int i = digits - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[v & 0xf];
        v >>= 4;
    }
    return out;
}

} // namespace coordbridge
