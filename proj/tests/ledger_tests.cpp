// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "floodgate/ledger.hpp"
#include "testutil.hpp"

using namespace floodgate;
using namespace floodgate::test;

TEST_CASE("genesis allocates the full supply at time zero", "[ledger]") {
    SECTION("single allocation") {
        World w = make_world(1000, {{"alice", 1000}});
        REQUIRE(w.chain().utxos().size() == 1);
        const auto& entry = w.chain().utxos().begin()->second;
        CHECK(entry.output.value == 1000);
        CHECK(entry.created_at == 0);
        CHECK(w.chain().utxo_total() == 1000);
        CHECK(w.chain().burned_total() == 0);
    }
    SECTION("mismatched sum rejected") {
        auto keys = std::make_shared<KeyRegistry>();
        KeyPair alice = keys->keygen("alice");
        ChainParams params;
        params.money_supply = 1000;
        params.miner = keys->keygen("miner").pub;
        CHECK_THROWS_AS(Ledger(params, keys, {{alice.pub, 999}}), AllocationMismatch);
    }
    SECTION("ten allocations of 100") {
        std::vector<std::pair<std::string, Amount>> alloc;
        for (int i = 0; i < 10; ++i) alloc.emplace_back("actor" + std::to_string(i), 100);
        World w = make_world(1000, alloc);
        CHECK(w.chain().utxos().size() == 10);
        CHECK(w.chain().utxo_total() + w.chain().burned_total() == 1000);
    }
}

TEST_CASE("validate_tx acceptance and error paths", "[ledger]") {
    World w = make_world(1000, {{"alice", 600}, {"bob", 400}});
    Ledger& chain = w.chain();

    SECTION("well-formed payment of 50 with 1-unit fee") {
        Transaction tx = make_payment(chain, w, "alice", "bob", 50, 1);
        CHECK_FALSE(chain.validate_tx(tx).has_value());
        CHECK(*chain.fee_of(tx) == 1);
    }
    SECTION("double spend of a confirmed outpoint is a missing input") {
        Transaction tx = make_payment(chain, w, "alice", "bob", 50, 1);
        REQUIRE(chain.submit_tx(tx).accepted);
        chain.mine_block(10);
        Transaction again = tx; // same inputs, now spent
        CHECK(chain.validate_tx(again) == TxError::MissingInput);
    }
    SECTION("duplicate outpoint within one tx") {
        auto op = find_utxo(chain, w.actor("alice").pub);
        Transaction tx;
        tx.inputs = {TxInput{*op, Signature{}}, TxInput{*op, Signature{}}};
        tx.outputs = {Output{600, w.actor("bob").pub, CoinKind{}}};
        tx.declared_size = 80;
        sign_all(tx, w.actor("alice").secret);
        CHECK(chain.validate_tx(tx) == TxError::MissingInput);
    }
    SECTION("bad signature") {
        Transaction tx = make_payment(chain, w, "alice", "bob", 50, 1);
        sign_all(tx, w.actor("bob").secret); // wrong key
        CHECK(chain.validate_tx(tx) == TxError::BadSignature);
    }
    SECTION("outputs exceeding inputs") {
        auto op = find_utxo(chain, w.actor("alice").pub);
        Transaction tx;
        tx.inputs = {TxInput{*op, Signature{}}};
        tx.outputs = {Output{601, w.actor("bob").pub, CoinKind{}}};
        tx.declared_size = 80;
        sign_all(tx, w.actor("alice").secret);
        CHECK(chain.validate_tx(tx) == TxError::ValueOverflow);
    }
    SECTION("output values that wrap 64-bit sums are still rejected") {
        auto op = find_utxo(chain, w.actor("alice").pub);
        Transaction tx;
        tx.inputs = {TxInput{*op, Signature{}}};
        // two halves of 2^64: a u64 sum would wrap to zero and pass
        tx.outputs = {Output{std::uint64_t{1} << 63, w.actor("bob").pub, CoinKind{}},
                      Output{std::uint64_t{1} << 63, w.actor("bob").pub, CoinKind{}}};
        tx.declared_size = 80;
        sign_all(tx, w.actor("alice").secret);
        CHECK(chain.validate_tx(tx) == TxError::ValueOverflow);
        CHECK_FALSE(chain.fee_of(tx).has_value());
    }
    SECTION("name input without matching name output") {
        Transaction reg = make_register(chain, w, "alice", "d/bob");
        REQUIRE(chain.submit_tx(reg).accepted);
        chain.mine_block(10);

        auto live = chain.resolve_name("d/bob");
        REQUIRE(live.has_value());
        Transaction bad;
        bad.inputs = {TxInput{live->first, Signature{}}};
        bad.outputs = {Output{1, w.actor("alice").pub, CoinKind{}}};
        bad.declared_size = 60;
        sign_all(bad, w.actor("alice").secret);
        CHECK(chain.validate_tx(bad) == TxError::NameMismatch);
    }
    SECTION("re-registering a live name without spending it") {
        Transaction reg = make_register(chain, w, "alice", "d/bob");
        REQUIRE(chain.submit_tx(reg).accepted);
        chain.mine_block(10);
        Transaction dup = make_register(chain, w, "bob", "d/bob");
        CHECK(chain.validate_tx(dup) == TxError::DuplicateName);
    }
}

TEST_CASE("fee_rate is the exact rational F/s", "[ledger]") {
    World w = make_world(10000, {{"alice", 10000}});
    Ledger& chain = w.chain();

    Transaction tx = make_payment(chain, w, "alice", "alice", 100, 500, 250);
    CHECK(*chain.fee_rate(tx) == Rational(2));

    Transaction free = make_payment(chain, w, "alice", "alice", 100, 0, 250);
    CHECK(*chain.fee_rate(free) == Rational(0));

    Transaction thirds = make_payment(chain, w, "alice", "alice", 100, 1, 3);
    CHECK(*chain.fee_rate(thirds) == Rational(1, 3));
}

TEST_CASE("mempool keeps the top entries by fee rate", "[ledger]") {
    // bound 2, holding fee rates {5, 3}; the derived oracle is top-k selection
    World w = make_world(100000, {{"a", 30000}, {"b", 30000}, {"c", 20000}, {"d", 20000}},
                         100, 10, 2);
    Ledger& chain = w.chain();

    auto pay_with_rate = [&](const std::string& from, Amount fee) {
        return make_payment(chain, w, from, from, 10, fee, 100); // rate = fee/100
    };
    REQUIRE(chain.submit_tx(pay_with_rate("a", 500)).accepted);  // rate 5
    REQUIRE(chain.submit_tx(pay_with_rate("b", 300)).accepted);  // rate 3

    SECTION("middle rate evicts the lowest") {
        Transaction mid = pay_with_rate("c", 400); // rate 4
        auto res = chain.submit_tx(mid);
        CHECK(res.accepted);
        REQUIRE(chain.mempool().size() == 2);
        std::set<std::int64_t> fees;
        for (const auto& [id, tx] : chain.mempool())
            fees.insert(static_cast<std::int64_t>(*chain.fee_of(tx)));
        CHECK(fees == std::set<std::int64_t>{400, 500});
    }
    SECTION("lowest incoming is rejected as MempoolFull") {
        Transaction low = pay_with_rate("c", 100); // rate 1
        auto res = chain.submit_tx(low);
        CHECK_FALSE(res.accepted);
        CHECK(res.reason == TxError::MempoolFull);
        CHECK(chain.mempool().size() == 2);
    }
}

namespace {

/// Exhaustive oracle: over all conflict-free subsets of the mempool of size
/// <= capacity, the best total fee rate achievable.
Rational best_subset_rate(const Ledger& chain, std::size_t capacity) {
    std::vector<const Transaction*> txs;
    for (const auto& [id, tx] : chain.mempool()) txs.push_back(&tx);
    std::size_t n = txs.size();
    REQUIRE(n <= 16);
    Rational best(0);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<const Transaction*> subset;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) subset.push_back(txs[i]);
        if (subset.size() > capacity) continue;
        std::set<Outpoint> used;
        bool conflict = false;
        Rational total(0);
        for (const auto* tx : subset) {
            for (const auto& in : tx->inputs) {
                if (used.count(in.prevout)) conflict = true;
                used.insert(in.prevout);
            }
            total = total + *chain.fee_rate(*tx);
        }
        if (!conflict && best < total) best = total;
    }
    return best;
}

} // namespace

TEST_CASE("mine_block picks the highest-paying transactions", "[ledger]") {
    SECTION("fee rates {5,3,7} with capacity 2 select {7,5}") {
        World w = make_world(100000, {{"a", 30000}, {"b", 30000}, {"c", 40000}}, 2, 10);
        Ledger& chain = w.chain();
        Transaction t5 = make_payment(chain, w, "a", "a", 10, 500, 100);
        Transaction t3 = make_payment(chain, w, "b", "b", 10, 300, 100);
        Transaction t7 = make_payment(chain, w, "c", "c", 10, 700, 100);
        REQUIRE(chain.submit_tx(t5).accepted);
        REQUIRE(chain.submit_tx(t3).accepted);
        REQUIRE(chain.submit_tx(t7).accepted);

        Rational oracle_best = best_subset_rate(chain, 2);
        const Block& block = chain.mine_block(10);
        REQUIRE(block.txs.size() == 2);
        std::set<Digest> got{block.txs[0].txid(), block.txs[1].txid()};
        CHECK(got == std::set<Digest>{t7.txid(), t5.txid()});
        Rational achieved =
            Rational(700, 100) + Rational(500, 100);
        CHECK(achieved == oracle_best);
        // the dropped tx remains pending
        CHECK(chain.mempool().size() == 1);
    }
    SECTION("empty mempool still advances the chain") {
        World w = make_world(1000, {{"alice", 1000}});
        const Block& block = w.chain().mine_block(10);
        CHECK(block.txs.empty());
        CHECK(block.timestamp == 10);
        CHECK(w.chain().height() == 1);
        CHECK_THROWS_AS(w.chain().mine_block(15), TooEarly);
        CHECK_NOTHROW(w.chain().mine_block(20));
    }
    SECTION("conflicting spends: only the higher fee rate confirms") {
        World w = make_world(1000, {{"alice", 1000}});
        Ledger& chain = w.chain();
        auto op = find_utxo(chain, w.actor("alice").pub);

        auto spend = [&](Amount fee, Amount out_value) {
            Transaction tx;
            tx.inputs = {TxInput{*op, Signature{}}};
            tx.outputs = {Output{out_value, w.actor("alice").pub, CoinKind{}}};
            tx.declared_size = 100;
            sign_all(tx, w.actor("alice").secret);
            REQUIRE(1000 - out_value == fee);
            return tx;
        };
        Transaction hi = spend(20, 980);
        Transaction lo = spend(10, 990);
        REQUIRE(chain.submit_tx(hi).accepted);
        REQUIRE(chain.submit_tx(lo).accepted);

        const Block& block = chain.mine_block(10);
        REQUIRE(block.txs.size() == 1);
        CHECK(block.txs[0].txid() == hi.txid());
        // the losing conflict is dropped from the mempool afterwards
        CHECK(chain.mempool().empty());
    }
}

TEST_CASE("destroyed coinage is value times age over inputs", "[ledger]") {
    World w = make_world(1000, {{"alice", 50}, {"bob", 10}, {"carol", 940}});
    Ledger& chain = w.chain();

    // ages measured from genesis (t=0) to the spend evaluation time
    Transaction tx;
    tx.inputs.push_back(TxInput{*find_utxo(chain, w.actor("alice").pub), Signature{}});
    tx.inputs.push_back(TxInput{*find_utxo(chain, w.actor("bob").pub), Signature{}});
    tx.outputs.push_back(Output{60, w.actor("carol").pub, CoinKind{}});
    tx.declared_size = 90;

    SECTION("v=50 at age 100 plus v=10 at age 10 is not applicable at one instant") {
        // evaluate (50 @ age 100s) + (10 @ age 10s): recreate bob's output at t=90
        Transaction refresh = make_payment(chain, w, "bob", "bob", 10, 0);
        REQUIRE(chain.submit_tx(refresh).accepted);
        chain.mine_block(90);

        Transaction spend;
        spend.inputs.push_back(TxInput{*find_utxo(chain, w.actor("alice").pub), Signature{}});
        spend.inputs.push_back(TxInput{*find_utxo(chain, w.actor("bob").pub), Signature{}});
        spend.outputs.push_back(Output{60, w.actor("carol").pub, CoinKind{}});
        spend.declared_size = 90;
        auto destroyed = chain.destroyed_coinage(spend, 100);
        REQUIRE(destroyed.ok());
        CHECK(destroyed.value() == 50 * 100 + 10 * 10); // 5100
    }
    SECTION("zero age destroys zero") {
        auto destroyed = chain.destroyed_coinage(tx, 0);
        REQUIRE(destroyed.ok());
        CHECK(destroyed.value() == 0);
    }
    SECTION("single input v=7 age=3") {
        World w7 = make_world(7, {{"solo", 7}});
        Transaction spend;
        spend.inputs.push_back(TxInput{*find_utxo(w7.chain(), w7.actor("solo").pub), Signature{}});
        spend.outputs.push_back(Output{7, w7.actor("solo").pub, CoinKind{}});
        spend.declared_size = 50;
        auto destroyed = w7.chain().destroyed_coinage(spend, 3);
        REQUIRE(destroyed.ok());
        CHECK(destroyed.value() == 21);
    }
    SECTION("missing input reported") {
        Transaction ghost;
        ghost.inputs.push_back(TxInput{Outpoint{hash("nowhere"), 0}, Signature{}});
        ghost.declared_size = 10;
        auto destroyed = chain.destroyed_coinage(ghost, 5);
        CHECK_FALSE(destroyed.ok());
        CHECK(destroyed.error() == TxError::MissingInput);
    }
}

TEST_CASE("utxo_coinage grows with the money supply as ceiling", "[ledger]") {
    SECTION("empty UTXO set") {
        World w = make_world(0, {});
        CHECK(w.chain().utxo_coinage(100) == 0);
    }
    SECTION("genesis M=1000 queried at t=10") {
        World w = make_world(1000, {{"alice", 1000}});
        CHECK(w.chain().utxo_coinage(10) == 10000);
    }
    SECTION("quiet window increase equals supply times dt") {
        World w = make_world(1000, {{"alice", 600}, {"bob", 400}});
        Coinage c1 = w.chain().utxo_coinage(50);
        Coinage c2 = w.chain().utxo_coinage(80);
        CHECK(c2 - c1 == w.chain().utxo_total() * 30);
    }
}

TEST_CASE("count_utxos_at_least and the scarcity bound", "[ledger]") {
    std::vector<std::pair<std::string, Amount>> alloc;
    for (int i = 0; i < 10; ++i) alloc.emplace_back("actor" + std::to_string(i), 100);
    World w = make_world(1000, alloc);

    CHECK(w.chain().count_utxos_at_least(100) == 10); // M/m bound reached
    CHECK(w.chain().count_utxos_at_least(101) == 0);
    for (Amount m : {1, 3, 10, 100, 999, 1000})
        CHECK(w.chain().count_utxos_at_least(m) <= 1000 / m);
}

TEST_CASE("resolve_name follows registrations and transfers", "[ledger]") {
    World w = make_world(1000, {{"alice", 600}, {"bob", 400}});
    Ledger& chain = w.chain();

    CHECK_FALSE(chain.resolve_name("d/bob").has_value());

    Transaction reg = make_register(chain, w, "alice", "d/bob");
    REQUIRE(chain.submit_tx(reg).accepted);
    chain.mine_block(10);

    auto live = chain.resolve_name("d/bob");
    REQUIRE(live.has_value());
    CHECK(live->second.owner == w.actor("alice").pub);

    // transfer to bob: spend name input, emit same-name output owned by bob
    Transaction transfer;
    transfer.inputs.push_back(TxInput{live->first, Signature{}});
    transfer.outputs.push_back(
        Output{live->second.value, w.actor("bob").pub, live->second.kind});
    transfer.declared_size = 70;
    sign_all(transfer, w.actor("alice").secret);
    REQUIRE(chain.submit_tx(transfer).accepted);
    chain.mine_block(20);

    auto moved = chain.resolve_name("d/bob");
    REQUIRE(moved.has_value());
    CHECK(moved->second.owner == w.actor("bob").pub);
    const auto* history = chain.name_owner_history("d/bob");
    REQUIRE(history != nullptr);
    CHECK(*history == std::vector<Digest>{w.actor("alice").pub, w.actor("bob").pub});
}

TEST_CASE("conservation and coinage bookkeeping across random histories", "[ledger][property]") {
    std::mt19937_64 rng(2026);
    for (int run = 0; run < 25; ++run) {
        Amount M = 1000 + rng() % 9000;
        std::vector<std::pair<std::string, Amount>> alloc;
        std::size_t actors = 2 + rng() % 4;
        Amount left = M;
        for (std::size_t i = 0; i + 1 < actors; ++i) {
            Amount cut = 1 + rng() % (left / 2 + 1);
            alloc.emplace_back("a" + std::to_string(i), cut);
            left -= cut;
        }
        alloc.emplace_back("a" + std::to_string(actors - 1), left);
        World w = make_world(M, alloc);
        Ledger& chain = w.chain();

        TimePoint now = 0;
        for (int step = 0; step < 12; ++step) {
            // a few random submissions
            std::size_t n_tx = rng() % 3;
            for (std::size_t t = 0; t < n_tx; ++t) {
                std::string from = "a" + std::to_string(rng() % actors);
                std::string to = "a" + std::to_string(rng() % actors);
                Amount bal = balance_of(chain, w.actor(from).pub);
                if (bal < 2) continue;
                Amount amount = 1 + rng() % (bal / 2);
                Amount fee = rng() % 3;
                if (amount + fee > bal) continue;
                Transaction tx = make_payment(chain, w, from, to, amount, fee,
                                              40 + static_cast<std::uint32_t>(rng() % 200));
                chain.submit_tx(tx);
            }
            if (rng() % 4 == 0) {
                std::string owner = "a" + std::to_string(rng() % actors);
                Amount burn = 1 + rng() % 3;
                if (find_utxo(chain, w.actor(owner).pub, burn).has_value()) {
                    Digest commitment = hash("c" + std::to_string(rng()));
                    chain.submit_tx(make_burn(chain, w, owner, burn, commitment));
                }
            }
            if (rng() % 3 == 0) {
                // random name churn: fresh registrations (possibly clashing)
                // and transfers of live names
                std::string owner = "a" + std::to_string(rng() % actors);
                std::string name = "d/n" + std::to_string(rng() % 6);
                if (find_utxo(chain, w.actor(owner).pub, 1).has_value()) {
                    auto res = chain.submit_tx(make_register(chain, w, owner, name));
                    if (!res.accepted)
                        CHECK((res.reason == TxError::DuplicateName ||
                               res.reason == TxError::MissingInput));
                }
            }
            if (rng() % 3 == 0) {
                std::string name = "d/n" + std::to_string(rng() % 6);
                if (auto live = chain.resolve_name(name)) {
                    // the current owner hands the name to a random actor
                    for (std::size_t a = 0; a < actors; ++a) {
                        if (w.actor("a" + std::to_string(a)).pub != live->second.owner)
                            continue;
                        Transaction transfer;
                        transfer.inputs.push_back(TxInput{live->first, Signature{}});
                        transfer.outputs.push_back(
                            Output{live->second.value,
                                   w.actor("a" + std::to_string(rng() % actors)).pub,
                                   live->second.kind});
                        transfer.declared_size = 70;
                        sign_all(transfer, w.actor("a" + std::to_string(a)).secret);
                        chain.submit_tx(transfer);
                        break;
                    }
                }
            }

            now = chain.next_block_time() + static_cast<Duration>(rng() % 5);
            std::map<Digest, Coinage> per_tx;
            for (const auto& [id, tx] : chain.mempool()) {
                auto d = chain.destroyed_coinage(tx, now);
                if (d.ok()) per_tx[id] = d.value();
            }
            Coinage coinage_before = chain.utxo_coinage(now);
            const Block& block = chain.mine_block(now);

            // conservation: all value is in the UTXO set or provably burned
            CHECK(chain.utxo_total() + chain.burned_total() == M);

            // scarcity at several thresholds
            for (Amount m : {Amount{1}, Amount{10}, Amount{100}})
                CHECK(chain.count_utxos_at_least(m) <= M / m);

            // confirming drops c_u by exactly the destroyed coinage; new
            // outputs re-enter at age zero
            Coinage destroyed_included = 0;
            for (const auto& tx : block.txs) {
                Digest id = tx.txid();
                CHECK(chain.confirmed(id)->coinage_destroyed == per_tx.at(id));
                destroyed_included += per_tx.at(id);
            }
            CHECK(chain.utxo_coinage(now) == coinage_before - destroyed_included);

            // name uniqueness: never two live outputs with the same name,
            // and the index points at a matching live output
            std::map<std::string, int> live_names;
            for (const auto& [op, e] : chain.utxos())
                if (const auto* n = e.output.name()) live_names[n->name]++;
            for (const auto& [name, count] : live_names) {
                CHECK(count == 1);
                auto resolved = chain.resolve_name(name);
                REQUIRE(resolved.has_value());
                CHECK(resolved->second.name()->name == name);
            }
        }
    }
}

TEST_CASE("canonical serialization round-trips through the wire form", "[ledger]") {
    World w = make_world(1000, {{"alice", 1000}});
    Ledger& chain = w.chain();
    Transaction tx = make_payment(chain, w, "alice", "alice", 10, 1);
    tx.outputs.push_back(Output{0, w.actor("alice").pub, BurnKind{hash("x")}});
    tx.outputs.push_back(Output{0, w.actor("alice").pub, NameKind{"d/x", "data"}});
    sign_all(tx, w.actor("alice").secret);

    Bytes wire = encode_tx_wire(tx);
    auto decoded = decode_tx_wire(wire);
    REQUIRE(decoded.has_value());
    CHECK(*decoded == tx);
    CHECK(decoded->txid() == tx.txid());

    // truncation and trailing garbage fail cleanly
    Bytes shorter(wire.begin(), wire.end() - 1);
    CHECK_FALSE(decode_tx_wire(shorter).has_value());
    Bytes longer = wire;
    longer.push_back(0);
    CHECK_FALSE(decode_tx_wire(longer).has_value());
}
