#include <catch2/catch_amalgamated.hpp>

#include "coordbridge/cli.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace coordbridge;

namespace {

struct outcome {
    int code;
    std::string out;
    std::string err;
};

outcome run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(COORDBRIDGE_MODELS) + "/" + name; }

} // namespace

TEST_CASE("verify theorem 1 on A12 prints the witness")
{
    const auto r = run({"verify", "--theorem", "1", "--inputs", fixture("a12.coord")});
    CHECK(r.code == 0);
    CHECK(r.out.find("((free,q) ~ (free,q_D))") != std::string::npos);
    CHECK(r.out.find("((taken,q) ~ (taken,q_D))") != std::string::npos);
}

TEST_CASE("bisim exit codes")
{
    CHECK(run({"bisim", fixture("mutex_reo.coord"), fixture("mutex_reo.coord")}).code == 0);
    CHECK(run({"bisim", fixture("a12.coord"), fixture("mutex_reo.coord")}).code == 0);
    CHECK(run({"bisim", fixture("mutex.coord"), fixture("mutex_reo.coord")}).code == 1);
}

TEST_CASE("malformed input and bad usage exit with 2")
{
    const std::string path = "cli_malformed.coord";
    std::ofstream(path) << "pa A { nodes a; states s; s -{a}-> ; }";
    const auto r = run({"parse", path});
    CHECK(r.code == 2);
    CHECK(r.err.find("cli_malformed.coord:1:") != std::string::npos);
    std::remove(path.c_str());

    CHECK(run({"parse", "does-not-exist.coord"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"verify", "--theorem", "9", "--random"}).code == 2);
    CHECK(run({"product", fixture("mutex.coord"), fixture("a12.coord")}).code == 2);
}

TEST_CASE("json-lines reports are reproducible")
{
    const std::vector<std::string> args{"verify", "--theorem", "4", "--random", "--cases", "25",
                                        "--seed", "3",        "--format", "json-lines"};
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    std::istringstream lines(a.out);
    std::size_t n = 0;
    for (std::string line; std::getline(lines, line); ++n)
        CHECK_NOTHROW(nlohmann::json::parse(line));
    CHECK(n > 25);
    CHECK(run({"verify", "--theorem", "4", "--random", "--cases", "25", "--seed", "4", "--format", "json-lines"})
              .out != a.out);
}

TEST_CASE("adversarial inputs are rejected, not verified")
{
    for (const auto* t : {"1", "2", "3", "4"}) {
        INFO("theorem " << t);
        CHECK(run({"verify", "--theorem", t, "--random", "--adversarial", "--cases", "20", "--seed", "2"}).code == 0);
    }
    const auto r = run({"verify", "--theorem", "1", "--inputs", fixture("foolproof.coord")});
    CHECK(r.code == 1);
    CHECK(r.out.find("precondition") != std::string::npos);
}

TEST_CASE("subcommands agree with the library")
{
    const auto reo = run({"to-reo", fixture("a12.coord")});
    REQUIRE(reo.code == 0);
    const auto parsed = parse(reo.out, model_kind::pa);
    REQUIRE(parsed.ok());
    CHECK(std::get<port_automaton>(parsed.doc->primary()) ==
          reo_a(std::get<bip_architecture>(cli::load(fixture("a12.coord")).primary())));

    const auto bip = run({"to-bip", fixture("alternator1.coord")});
    REQUIRE(bip.code == 0);
    CHECK(bip.out.find("{b1,b1',f1,f1'}") != std::string::npos);

    CHECK(run({"classcheck", fixture("foolproof.coord")}).code == 1);
    CHECK(run({"classcheck", fixture("foolproof_idle.coord")}).code == 0);

    const auto product = run({"product", fixture("mutex.coord"), fixture("alternator1.coord"),
                              fixture("alternator2.coord")});
    CHECK(product.code == 0);

    const auto hide = run({"hide", "--ports", "b12,f12", fixture("a12.coord")});
    CHECK(hide.code == 2);

    const auto interp = run({"interpret", fixture("max.coord"), "--format", "json-lines"});
    CHECK(interp.code == 0);

    const auto dot = run({"dot", fixture("mutex_reo.coord")});
    CHECK(dot.out.starts_with("digraph"));
}
