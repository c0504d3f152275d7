// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <catch2/catch_amalgamated.hpp>

#include "floodgate/scenario.hpp"

using namespace floodgate;

TEST_CASE("minimal scenario: defaults fill in", "[scenario]") {
    Scenario sc = parse_scenario("policy {\n  kind hashcash\n}\n");
    CHECK(sc.policy.kind == PolicyKind::Hashcash);
    CHECK(sc.version == 1);
    CHECK(sc.supply == 1000000);
    CHECK(sc.net.node_count == 8);
    CHECK(sc.net.topology == Topology::Ring);
    CHECK(sc.policy.window == 3600);
    CHECK(sc.actors.sellers == 2);
    CHECK(sc.duration == 7200);
}

TEST_CASE("full scenario file parses", "[scenario]") {
    const char* text = R"(
# flood experiment
version 1
name flood-utxo
seed 42
duration 7800
setup_duration 600

ledger {
  supply 1000
  block_capacity 10
  block_interval 10
}

net {
  nodes 8
  topology ring
  hop_latency 1
  bandwidth 1000000
}

policy {
  kind utxo
  min_value 1
  window 3600
  grants 1
}

actors {
  sellers 2
  names_per_seller 1
  offer_interval 86400
  seller_funds 50
  attacker {
    budget 10
    rate 120
    strategy flood
    spam_size 100
  }
}
)";
    Scenario sc = parse_scenario(text);
    CHECK(sc.name == "flood-utxo");
    CHECK(sc.seed == 42);
    CHECK(sc.supply == 1000);
    CHECK(sc.policy.kind == PolicyKind::UtxoIdentity);
    CHECK(sc.actors.attacker.budget == 10);
    CHECK(sc.actors.attacker.strategy == AttackStrategy::Flood);
}

TEST_CASE("validation failures carry field paths", "[scenario]") {
    SECTION("attacker budget above the money supply") {
        const char* text = "ledger {\n supply 100\n}\nactors {\n attacker {\n budget 200\n }\n}\n";
        try {
            parse_scenario(text);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(e.field_path == "actors.attacker.budget");
        }
    }
    SECTION("unknown policy name") {
        CHECK_THROWS_AS(parse_scenario("policy {\n kind captcha\n}\n"), ValidationError);
    }
    SECTION("unknown key reports its dotted path") {
        try {
            parse_scenario("net {\n fanout 3\n}\n");
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(e.field_path == "net.fanout");
        }
    }
    SECTION("duration must cover one policy window") {
        CHECK_THROWS_AS(parse_scenario("duration 100\npolicy {\n window 3600\n}\n"),
                        ValidationError);
    }
    SECTION("random topology degree bound") {
        CHECK_THROWS_AS(parse_scenario("net {\n nodes 4\n topology random\n degree 6\n}\n"),
                        ValidationError);
    }
    SECTION("coinage arithmetic must stay representable") {
        CHECK_THROWS_AS(
            parse_scenario("ledger {\n supply 18446744073709551615\n}\nduration 7200\n"),
            ValidationError);
    }
}

TEST_CASE("parse failures", "[scenario]") {
    CHECK_THROWS_AS(parse_scenario("seed banana\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario("ledger {\n supply 10\n"), ParseError); // unclosed
    CHECK_THROWS_AS(parse_scenario("}\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario("lonely\n"), ParseError);
}

TEST_CASE("echo round-trip is exact", "[scenario]") {
    Scenario sc = parse_scenario("name echo-test\nseed 9\npolicy {\n kind burn\n min_burn 5\n}\n");
    std::string echoed = render_scenario(sc);
    Scenario back = parse_scenario(echoed);
    CHECK(render_scenario(back) == echoed);
}

TEST_CASE("load_scenario reports missing files", "[scenario]") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/path.scn"), IoError);
}

TEST_CASE("shipped scenario files stay loadable", "[scenario]") {
    // ctest runs with the repository root as working directory
    for (const char* path :
         {"scenarios/flood_utxo.scn", "scenarios/compare_exchange.scn",
          "scenarios/honest_exchange.scn", "scenarios/sybil_split.scn"}) {
        INFO(path);
        Scenario sc = load_scenario(path);
        CHECK(render_scenario(sc) == render_scenario(parse_scenario(render_scenario(sc))));
    }
}
