// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "floodgate/netsim.hpp"
#include "testutil.hpp"

using namespace floodgate;
using namespace floodgate::test;

namespace {

std::function<std::unique_ptr<AdmissionPolicy>()> factory(PolicySpec spec) {
    return [spec] { return make_policy(spec); };
}

P2PMessage pow_blob(const std::string& text, std::uint64_t d,
                    std::uint32_t declared_size = 100) {
    Bytes payload = make_payload(BodyType::Blob, to_bytes(text));
    std::uint64_t n = hashcash_solve(payload, d);
    return make_message(payload, declared_size, Proof{HashcashProof{d, n}});
}

} // namespace

TEST_CASE("topology construction", "[netsim]") {
    World w = make_world(1000, {{"alice", 1000}});

    SECTION("ring gives every node two peers") {
        NetConfig cfg;
        cfg.node_count = 10;
        cfg.topology = Topology::Ring;
        Network net(cfg, w.chain(), factory({}));
        for (std::uint32_t i = 0; i < 10; ++i)
            CHECK(net.node(i).peers.size() == 2);
        CHECK(net.diameter() == 5);
    }
    SECTION("random k-regular is deterministic per seed") {
        NetConfig cfg;
        cfg.node_count = 12;
        cfg.topology = Topology::RandomRegular;
        cfg.degree = 4;
        cfg.seed = 77;
        Network a(cfg, w.chain(), factory({}));
        Network b(cfg, w.chain(), factory({}));
        for (std::uint32_t i = 0; i < 12; ++i) {
            CHECK(a.node(i).peers == b.node(i).peers);
            CHECK(a.node(i).peers.size() == 4);
        }
    }
    SECTION("degree at or above node count is rejected") {
        NetConfig cfg;
        cfg.node_count = 4;
        cfg.topology = Topology::RandomRegular;
        cfg.degree = 4;
        CHECK_THROWS_AS(Network(cfg, w.chain(), factory({})), DisconnectedTopology);
    }
    SECTION("complete graph has diameter 1") {
        NetConfig cfg;
        cfg.node_count = 5;
        cfg.topology = Topology::Complete;
        Network net(cfg, w.chain(), factory({}));
        CHECK(net.diameter() == 1);
        for (std::uint32_t i = 0; i < 5; ++i)
            CHECK(net.node(i).peers.size() == 4);
    }
}

TEST_CASE("broadcast floods admitted messages to every node", "[netsim]") {
    World w = make_world(1000, {{"alice", 1000}});
    NetConfig cfg;
    cfg.node_count = 10;
    cfg.topology = Topology::Ring;
    cfg.hop_latency = 2;
    PolicySpec spec;
    spec.kind = PolicyKind::Hashcash;
    spec.hashcash_floor = 1;

    SECTION("admitted message reaches all nodes within diameter hops") {
        Network net(cfg, w.chain(), factory(spec));
        std::map<std::uint32_t, TimePoint> first_seen;
        net.set_accept_hook([&](Network&, std::uint32_t node, const P2PMessage&,
                                TimePoint at) { first_seen.emplace(node, at); });
        P2PMessage msg = pow_blob("flood", 2);
        net.schedule_action(5, [&](Network& n, TimePoint) { n.broadcast(0, msg); });
        net.run_until(100);

        REQUIRE(first_seen.size() == 10);
        for (const auto& [node, at] : first_seen)
            CHECK(at <= 5 + static_cast<TimePoint>(net.diameter()) * cfg.hop_latency);
        // exact arrival on the ring: distance d costs d hops of latency 2
        CHECK(first_seen[5] == 5 + 5 * 2);
        CHECK(first_seen[1] == 5 + 2);
    }
    SECTION("rejected at origin produces zero network events") {
        Network net(cfg, w.chain(), factory(spec));
        P2PMessage bad = make_message(make_payload(BodyType::Blob, to_bytes("junk")), 50,
                                      Proof{HashcashProof{1u << 20, 0}});
        net.schedule_action(5, [&](Network& n, TimePoint) { n.broadcast(0, bad); });
        net.run_until(100);
        std::size_t deliveries = 0;
        for (const auto& r : net.trace())
            if (r.event == "deliver") ++deliveries;
        CHECK(deliveries == 0);
        CHECK(net.node(0).rejected.at(RejectReason::InvalidPoW) == 1);
    }
    SECTION("duplicate broadcasts are dropped by dedup") {
        Network net(cfg, w.chain(), factory(spec));
        P2PMessage msg = pow_blob("once", 2);
        net.schedule_action(5, [&](Network& n, TimePoint) { n.broadcast(0, msg); });
        net.schedule_action(50, [&](Network& n, TimePoint) { n.broadcast(0, msg); });
        net.run_until(200);
        std::size_t dup_drops = 0;
        for (const auto& r : net.trace())
            if (r.reason == RejectReason::Duplicate) ++dup_drops;
        CHECK(dup_drops >= 1);
        // each node admitted it exactly once
        for (std::uint32_t i = 0; i < 10; ++i) CHECK(net.node(i).admitted == 1);
    }
    SECTION("no amplification: deliveries bounded by the edge count") {
        Network net(cfg, w.chain(), factory(spec));
        P2PMessage msg = pow_blob("bounded", 2);
        net.schedule_action(1, [&](Network& n, TimePoint) { n.broadcast(0, msg); });
        net.run_until(200);
        std::size_t deliveries = 0;
        std::size_t degree_sum = 0;
        for (const auto& r : net.trace())
            if (r.event == "deliver" && r.digest == msg.digest) ++deliveries;
        for (std::uint32_t i = 0; i < 10; ++i) degree_sum += net.node(i).peers.size();
        CHECK(deliveries <= degree_sum);
    }
}

TEST_CASE("offers under the UTXO quota policy", "[netsim]") {
    World w = make_world(1000, {{"sally", 200}, {"rest", 800}});
    Ledger& chain = w.chain();
    Transaction reg = make_register(chain, w, "sally", "d/shop", 1);
    REQUIRE(chain.submit_tx(reg).accepted);
    chain.mine_block(10);
    KeyPair sally = w.actor("sally");
    Outpoint name_op = chain.resolve_name("d/shop")->first;

    NetConfig cfg;
    cfg.node_count = 6;
    cfg.topology = Topology::Complete;
    PolicySpec spec;
    spec.kind = PolicyKind::UtxoIdentity;
    spec.min_value = 1;
    spec.window = 3600;
    spec.grants = 1;
    Network net(cfg, chain, factory(spec));

    auto offer_message = [&](Amount price) {
        auto offer = make_offer(chain, "d/shop", price, sally.pub, 90000, sally.secret);
        REQUIRE(offer.ok());
        Bytes payload = make_payload(BodyType::Offer, offer->encode());
        P2PMessage msg = make_message(payload, 120, Proof{NoProof{}});
        msg.proof = UtxoOwnerProof{name_op, sign(sally.secret, msg.digest)};
        return msg;
    };

    P2PMessage first = offer_message(100);
    P2PMessage second = offer_message(90);
    net.schedule_action(100, [&](Network& n, TimePoint) { n.broadcast(0, first); });
    // the second within the hour is pushed by a node ignoring its own policy
    net.schedule_action(200, [&](Network& n, TimePoint) { n.inject(0, second); });
    net.run_until(5000);

    for (std::uint32_t i = 0; i < 6; ++i) {
        // the first offer is booked everywhere; the second hit the quota
        CHECK(net.node(i).offer_book.size() == 1);
        CHECK(net.node(i).offer_book.count(first.digest) == 1);
        if (i != 0) CHECK(net.node(i).rejected.at(RejectReason::QuotaExhausted) >= 1);
    }

    // local enforcement: books only hold messages the node itself relayed
    for (std::uint32_t i = 0; i < 6; ++i) {
        std::set<Digest> relayed;
        for (const auto& r : net.trace())
            if (r.node == static_cast<std::int32_t>(i) && r.decision == "relay")
                relayed.insert(r.digest);
        for (const auto& [digest, offer] : net.node(i).offer_book)
            CHECK(relayed.count(digest) == 1);
    }
}

TEST_CASE("invalid offers are dropped and not relayed", "[netsim]") {
    World w = make_world(1000, {{"sally", 200}, {"rest", 800}});
    Ledger& chain = w.chain();
    Transaction reg = make_register(chain, w, "sally", "d/shop", 1);
    REQUIRE(chain.submit_tx(reg).accepted);
    chain.mine_block(10);

    NetConfig cfg;
    cfg.node_count = 4;
    cfg.topology = Topology::Complete;
    PolicySpec spec; // policy=none: admission passes, content check still applies
    Network net(cfg, chain, factory(spec));

    SellOffer forged{"d/shop", 50, w.actor("rest").pub, 90000, Signature{}};
    forged.offer_sig = sign(w.actor("rest").secret, forged.canonical()); // not the owner
    P2PMessage msg = make_message(make_payload(BodyType::Offer, forged.encode()), 120,
                                  Proof{NoProof{}});
    net.schedule_action(20, [&](Network& n, TimePoint) { n.broadcast(0, msg); });
    net.run_until(100);

    for (std::uint32_t i = 0; i < 4; ++i) CHECK(net.node(i).offer_book.empty());
    CHECK(net.node(0).rejected.at(RejectReason::OfferInvalid) == 1);
    std::size_t forwards = 0;
    for (const auto& r : net.trace())
        if (r.event == "forward") ++forwards;
    CHECK(forwards == 0);
}

TEST_CASE("bandwidth budget queues over-budget relays by priority", "[netsim]") {
    World w = make_world(1000, {{"alice", 1000}});
    NetConfig cfg;
    cfg.node_count = 2;
    cfg.topology = Topology::Ring;
    cfg.hop_latency = 1;
    cfg.bandwidth_budget = 1000;
    cfg.tick = 1;
    PolicySpec spec;
    spec.kind = PolicyKind::Hashcash;
    spec.hashcash_floor = 1;
    Network net(cfg, w.chain(), factory(spec));

    // hashcash proof wire size is 17 bytes; declared 483 makes 500 on the wire
    P2PMessage m3 = pow_blob("low", 3, 483);
    P2PMessage m5 = pow_blob("mid", 5, 483);
    P2PMessage m7 = pow_blob("high", 7, 483);
    net.schedule_action(5, [&](Network& n, TimePoint) {
        n.broadcast(0, m3);
        n.broadcast(0, m5);
        n.broadcast(0, m7);
    });
    net.run_until(50);

    std::vector<std::pair<TimePoint, Digest>> forwards;
    for (const auto& r : net.trace())
        if (r.event == "forward" && r.node == 0) forwards.emplace_back(r.at, r.digest);
    REQUIRE(forwards.size() == 3);
    // two fit in the t=5 window, highest difficulty first; the third waits
    CHECK(forwards[0] == std::make_pair(TimePoint{5}, m7.digest));
    CHECK(forwards[1] == std::make_pair(TimePoint{5}, m5.digest));
    CHECK(forwards[2] == std::make_pair(TimePoint{6}, m3.digest));
}

TEST_CASE("run is deterministic and time-bounded", "[netsim]") {
    auto run_once = [](std::uint64_t seed) {
        World w = make_world(1000, {{"alice", 1000}});
        NetConfig cfg;
        cfg.node_count = 9;
        cfg.topology = Topology::RandomRegular;
        cfg.degree = 4;
        cfg.seed = seed;
        PolicySpec spec;
        spec.kind = PolicyKind::Hashcash;
        spec.hashcash_floor = 1;
        Network net(cfg, w.chain(), factory(spec));
        for (int k = 0; k < 5; ++k) {
            P2PMessage msg = pow_blob("m" + std::to_string(k), 2 + k);
            net.schedule_action(3 + 7 * k, [msg, k](Network& n, TimePoint) {
                n.broadcast(static_cast<std::uint32_t>(k % 9), msg);
            });
        }
        net.schedule_block(w.chain().next_block_time());
        net.run_until(400);
        return net.render_trace();
    };
    SECTION("identical seeds give byte-identical traces") {
        CHECK(run_once(101) == run_once(101));
    }
    SECTION("running until zero processes nothing") {
        World w = make_world(1000, {{"alice", 1000}});
        NetConfig cfg;
        cfg.node_count = 3;
        cfg.topology = Topology::Ring;
        Network net(cfg, w.chain(), factory({}));
        P2PMessage msg = make_message(make_payload(BodyType::Blob, to_bytes("later")), 10,
                                      Proof{NoProof{}});
        net.schedule_action(1, [&](Network& n, TimePoint) { n.broadcast(0, msg); });
        net.run_until(0);
        CHECK(net.trace().empty());
    }
}

TEST_CASE("counters reconcile with the trace", "[netsim]") {
    World w = make_world(1000, {{"alice", 1000}});
    NetConfig cfg;
    cfg.node_count = 6;
    cfg.topology = Topology::Complete;
    PolicySpec spec;
    spec.kind = PolicyKind::Hashcash;
    spec.hashcash_floor = 4;
    Network net(cfg, w.chain(), factory(spec));

    for (int k = 0; k < 4; ++k) {
        P2PMessage ok = pow_blob("ok " + std::to_string(k), 4 + k);
        P2PMessage weak = make_message(
            make_payload(BodyType::Blob, to_bytes("weak " + std::to_string(k))), 60,
            Proof{HashcashProof{2, hashcash_solve(
                                       make_payload(BodyType::Blob,
                                                    to_bytes("weak " + std::to_string(k))),
                                       2)}});
        net.schedule_action(1 + k, [ok](Network& n, TimePoint) { n.broadcast(0, ok); });
        net.schedule_action(2 + k, [weak](Network& n, TimePoint) { n.broadcast(1, weak); });
    }
    net.run_until(300);

    std::map<std::int32_t, std::uint64_t> relay_count, drop_count;
    for (const auto& r : net.trace()) {
        if (r.decision == "relay") relay_count[r.node]++;
        if (r.decision == "drop") drop_count[r.node]++;
    }
    for (std::uint32_t i = 0; i < 6; ++i) {
        std::uint64_t rejected_total = 0;
        for (const auto& [reason, count] : net.node(i).rejected) rejected_total += count;
        CHECK(net.node(i).admitted == relay_count[static_cast<std::int32_t>(i)]);
        CHECK(rejected_total == drop_count[static_cast<std::int32_t>(i)]);
    }
}
