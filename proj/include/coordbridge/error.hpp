#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coordbridge {

enum class errc {
    invalid_model,
    alphabet_mismatch,
    not_single_state,
    unbound_port,
    unknown_function,
    domain_too_large,
    domain_mismatch,
    mixed_nodes_present,
    not_stateless,
    not_disconnected,
    interface_not_covered,
    coordinator_ports_overlap,
    interaction_out_of_interface,
    prime_collision,
    state_changing_empty,
    not_simple,
    fresh_name_exhausted,
    arity_error,
};

inline std::string_view to_string(errc code)
{
    switch (code) {
    case errc::invalid_model: return "InvalidModel";
    case errc::alphabet_mismatch: return "AlphabetMismatch";
    case errc::not_single_state: return "NotSingleState";
    case errc::unbound_port: return "UnboundPort";
    case errc::unknown_function: return "UnknownFunction";
    case errc::domain_too_large: return "DomainTooLarge";
    case errc::domain_mismatch: return "DomainMismatch";
    case errc::mixed_nodes_present: return "MixedNodesPresent";
    case errc::not_stateless: return "NotStateless";
    case errc::not_disconnected: return "NotDisconnected";
    case errc::interface_not_covered: return "InterfaceNotCovered";
    case errc::coordinator_ports_overlap: return "CoordinatorPortsOverlap";
    case errc::interaction_out_of_interface: return "InteractionOutOfInterface";
    case errc::prime_collision: return "PrimeCollision";
    case errc::state_changing_empty: return "StateChangingEmpty";
    case errc::not_simple: return "NotSimple";
    case errc::fresh_name_exhausted: return "FreshNameExhausted";
    case errc::arity_error: return "ArityError";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message)
    {
    }

    [[nodiscard]] errc code() const noexcept { return code_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    errc code_;
    std::string message_;
};

} // namespace coordbridge
