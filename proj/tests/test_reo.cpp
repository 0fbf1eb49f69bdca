#include <catch2/catch_amalgamated.hpp>

#include "coordbridge/random.hpp"
#include "coordbridge/reo.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace coordbridge;

namespace {

std::set<std::tuple<std::string, port_set, std::string>> plain_edges(const constraint_automaton& a)
{
    return oracle::edges(to_port_automaton(a));
}

using edge = oracle::named_edge;

} // namespace

TEST_CASE("channel primitives")
{
    const auto sync = primitive(primitive_kind::sync, "A", "B");
    CHECK(is_stateless(sync));
    CHECK(is_port_automaton(sync));
    CHECK(plain_edges(sync) == std::set<edge>{{"q", {"A", "B"}, "q"}});

    const auto fifo = primitive(primitive_kind::fifo1, "A", "B");
    CHECK_FALSE(is_stateless(fifo));
    CHECK(fifo.graph().initial_state() == "q0");
    CHECK(plain_edges(fifo) == std::set<edge>{{"q0", {"A"}, "q1"}, {"q1", {"B"}, "q0"}});

    CHECK(plain_edges(primitive(primitive_kind::lossy_sync, "A", "B")) ==
          std::set<edge>{{"q", {"A", "B"}, "q"}, {"q", {"A"}, "q"}});
    CHECK(plain_edges(primitive(primitive_kind::sync_drain, "A", "B")) == std::set<edge>{{"q", {"A", "B"}, "q"}});

    const auto node = node_primitive({"B", "B'"}, {"A", "A'"});
    CHECK(plain_edges(node) == std::set<edge>{{"q", {"B", "A", "A'"}, "q"}, {"q", {"B'", "A", "A'"}, "q"}});

    CHECK_THROWS_AS(primitive(primitive_kind::sync, "A", "A"), error);
    CHECK_THROWS_AS(node_primitive({}, {"A"}), error);
}

TEST_CASE("the DSL fixtures of the channel table agree with the library")
{
    CHECK(support::load<constraint_automaton>("sync.coord").graph().transitions().size() == 1);
    CHECK(plain_edges(support::load<constraint_automaton>("fifo1.coord")) ==
          plain_edges(primitive(primitive_kind::fifo1, "a", "b")));
    CHECK(plain_edges(support::load<constraint_automaton>("lossy_sync.coord")) ==
          plain_edges(primitive(primitive_kind::lossy_sync, "a", "b")));
    CHECK(plain_edges(support::load<constraint_automaton>("sync_drain.coord")) ==
          plain_edges(primitive(primitive_kind::sync_drain, "a", "b")));
}

TEST_CASE("product of two syncs sharing a node")
{
    const auto ab = primitive(primitive_kind::sync, "A", "B");
    const auto bc = primitive(primitive_kind::sync, "B", "C");
    const auto p = ca_product(ab, bc);
    CHECK(p.nodes() == port_set{"A", "B", "C"});
    CHECK(plain_edges(p) == std::set<edge>{{"(q,q)", {"A", "B", "C"}, "(q,q)"}});
}

TEST_CASE("the empty automaton is neutral for the product")
{
    const port_automaton unit("E", {}, state_graph<port_set>({"q"}, 0, {}));
    const auto foolproof = support::load<port_automaton>("foolproof.coord");
    CHECK(isomorphic(interpret_pa(pa_product(foolproof, unit)), interpret_pa(foolproof)));
    CHECK(isomorphic(interpret_pa(pa_product(unit, foolproof)), interpret_pa(foolproof)));
}

TEST_CASE("port-automaton product follows the two rules")
{
    gen::rng r(17);
    gen::bounds b;
    for (int i = 0; i < 200; ++i) {
        const auto a1 = gen::pa_prime(r, b, "P", {"a", "b", "c"});
        const auto a2 = gen::pa_prime(r, b, "Q", {"b", "c", "d"});
        INFO("case " << i);
        CHECK(oracle::edges(pa_product(a1, a2)) == oracle::product_edges(a1, a2));
    }
    // a product with a renamed copy of itself interleaves and joins
    const auto a = support::load<port_automaton>("alternator1.coord");
    std::map<port_name, port_name> shift;
    for (const auto& n : a.nodes())
        shift[n] = n + "'";
    const auto copy = rename_nodes(a, shift);
    CHECK(oracle::edges(pa_product(a, copy)) == oracle::product_edges(a, copy));
}

TEST_CASE("the fool-proof mutex has the three-state reachable part")
{
    const auto p = pa_product(pa_product(support::load<port_automaton>("mutex.coord"),
                                         support::load<port_automaton>("alternator1.coord")),
                              support::load<port_automaton>("alternator2.coord"));
    const auto reach = reachable_part(p);
    CHECK(reach.graph().state_count() == 3);
    CHECK(isomorphic(interpret_pa(reach), interpret_pa(support::load<port_automaton>("foolproof.coord"))));
}

TEST_CASE("hiding")
{
    const auto foolproof = support::load<port_automaton>("foolproof.coord");
    CHECK(pa_hide(foolproof, {}) == foolproof);

    const auto sync = primitive(primitive_kind::sync, "A", "B");
    const auto hidden = ca_hide(sync, {"A", "B"});
    REQUIRE(hidden.graph().transitions().size() == 1);
    CHECK(hidden.graph().transitions()[0].label.ports.empty());
    CHECK(dc_equivalent(hidden.graph().transitions()[0].label.guard, dc::top(), {}, hidden.domain()));

    // data-carrying sync: the guard is quantified over the hidden end
    const auto d = finite_domain::make("D", {0, 1});
    const auto half = ca_hide(primitive(primitive_kind::sync, "A", "B", d), {"B"});
    const auto& l = half.graph().transitions()[0].label;
    CHECK(l.ports == port_set{"A"});
    CHECK(free_ports(l.guard) == port_set{"A"});
    CHECK(dc_equivalent(l.guard, dc::top(), {"A"}, d));
}

TEST_CASE("f_a and f_b")
{
    const auto empty = interpret_pa(port_automaton("E", {}, state_graph<port_set>({"q"}, 0, {})));
    CHECK(empty.state_count() == 1);
    CHECK(empty.transitions().empty());

    const auto mutex = support::load<port_automaton>("mutex.coord");
    std::set<label> labels;
    const auto mx = interpret_pa(mutex);
    for (const auto& t : mx.transitions())
        labels.insert(t.label);
    CHECK(labels == std::set<label>{port_set{"b1"}, port_set{"b2"}, port_set{"f1"}, port_set{"f2"}});

    const auto sync_data = support::load<constraint_automaton>("sync_data.coord");
    const auto f = interpret_ca(polarized_ca(sync_data));
    CHECK(f.transitions().size() == 2);
    for (const auto& t : f.transitions()) {
        const auto& a = std::get<assignment>(t.label);
        CHECK(a.at("a*") == a.at("b_*"));
        CHECK_FALSE(a.at("a_*").has_value());
        CHECK_FALSE(a.at("b*").has_value());
    }

    const auto bare = interpret_ca(polarized_ca(constraint_automaton(
        "N", {}, finite_domain::make("D", {0, 1}), {}, state_graph<ca_label>({"q"}, 0, {}))));
    CHECK(bare.transitions().empty());
    CHECK(bare.alpha().ports.empty());
}

TEST_CASE("reo errors")
{
    const auto d2 = finite_domain::make("D", {0, 1});
    const auto d3 = finite_domain::make("D", {0, 1, 2});
    try {
        (void)ca_product(primitive(primitive_kind::sync, "A", "B", d2), primitive(primitive_kind::sync, "B", "C", d3));
        FAIL("expected DomainMismatch");
    }
    catch (const error& e) {
        CHECK(e.code() == errc::domain_mismatch);
    }
    try {
        (void)polarized_ca(primitive(primitive_kind::fifo1, "a*", "b_*"));
        FAIL("expected NotStateless");
    }
    catch (const error& e) {
        CHECK(e.code() == errc::not_stateless);
    }
    const constraint_automaton with_mixed("M", {"a*", "m", "b_*"}, d2, {},
                                          state_graph<ca_label>({"q"}, 0, {{0, {{"a*", "m"}, dc::top()}, 0}}));
    try {
        (void)interpret_ca(polarized_ca(with_mixed));
        FAIL("expected MixedNodesPresent");
    }
    catch (const error& e) {
        CHECK(e.code() == errc::mixed_nodes_present);
    }
    CHECK(interpret_ca(polarized_ca(ca_hide(with_mixed, {"m"}))).transitions().size() == 2);
}
