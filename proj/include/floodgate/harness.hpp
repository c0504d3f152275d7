// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "floodgate/exchange.hpp"
#include "floodgate/netsim.hpp"
#include "floodgate/report.hpp"
#include "floodgate/scenario.hpp"

namespace floodgate {

/// Why a transaction was put on the chain; drives the measured
/// blockchain-usage classification.
enum class TxTag {
    PolicySetup,      // identity/quota preparation (burns, UTXO splits)
    PolicyPerMessage, // fee/coinage transaction backing one message
    Exchange,         // name registrations and settled trades
    Funding,          // actor plumbing
};

struct RunResult {
    ScenarioReport report;
    std::string trace_text;
};

namespace harness_detail {

class Runner {
public:
    explicit Runner(const Scenario& sc) : sc_(sc), rng_(sc.seed) {}

    RunResult run() {
        build_world();
        schedule_blocks();
        schedule_setup();
        schedule_sellers();
        schedule_buyers();
        schedule_attacker();
        schedule_controller();
        net_->run_until(sc_.duration);
        return assemble();
    }

private:
    // --- world construction -------------------------------------------------

    void build_world() {
        miner_ = keys_->keygen("miner");
        reserve_ = keys_->keygen("reserve");
        for (std::uint32_t i = 0; i < sc_.actors.sellers; ++i)
            sellers_.push_back(keys_->keygen("seller-" + std::to_string(i)));
        for (std::uint32_t i = 0; i < sc_.actors.buyers; ++i)
            buyers_.push_back(keys_->keygen("buyer-" + std::to_string(i)));
        attacker_ = keys_->keygen("attacker");
        buyer_taken_.resize(buyers_.size());

        ChainParams params;
        params.money_supply = sc_.supply;
        params.block_capacity = sc_.block_capacity;
        params.block_interval = sc_.block_interval;
        params.mempool_limit = sc_.mempool_limit;
        params.miner = miner_.pub;

        std::vector<std::pair<Digest, Amount>> alloc;
        Amount allocated = 0;
        for (const auto& kp : sellers_)
            if (sc_.actors.seller_funds > 0) {
                alloc.emplace_back(kp.pub, sc_.actors.seller_funds);
                allocated += sc_.actors.seller_funds;
            }
        for (const auto& kp : buyers_)
            if (sc_.actors.buyer_funds > 0) {
                alloc.emplace_back(kp.pub, sc_.actors.buyer_funds);
                allocated += sc_.actors.buyer_funds;
            }
        if (sc_.actors.attacker.budget > 0) {
            alloc.emplace_back(attacker_.pub, sc_.actors.attacker.budget);
            allocated += sc_.actors.attacker.budget;
        }
        if (allocated < sc_.supply)
            alloc.emplace_back(reserve_.pub, sc_.supply - allocated);
        ledger_ = std::make_unique<Ledger>(params, keys_, alloc);

        NetConfig net_cfg = sc_.net;
        net_cfg.seed = sc_.seed;
        PolicySpec spec = sc_.policy;
        net_ = std::make_unique<Network>(net_cfg, *ledger_,
                                         [spec] { return make_policy(spec); });
        net_->set_accept_hook([this](Network& n, std::uint32_t node,
                                     const P2PMessage& msg, TimePoint at) {
            on_accept(n, node, msg, at);
        });
    }

    std::uint32_t node_count() const { return sc_.net.node_count; }
    std::uint32_t attacker_home() const { return node_count() - 1; }
    std::uint32_t honest_home(std::size_t i) const {
        std::uint32_t n = node_count();
        return n > 1 ? static_cast<std::uint32_t>(i % (n - 1)) : 0;
    }
    std::uint32_t seller_home(std::size_t i) const { return honest_home(i); }
    std::uint32_t buyer_home(std::size_t i) const {
        return honest_home(sellers_.size() + i);
    }

    // --- transaction helpers ------------------------------------------------

    std::vector<std::pair<Outpoint, Amount>> coin_utxos(const Digest& owner) const {
        std::vector<std::pair<Outpoint, Amount>> out;
        for (const auto& [op, e] : ledger_->utxos())
            if (e.output.owner == owner && !e.output.is_name())
                out.emplace_back(op, e.output.value);
        return out;
    }

    Amount coin_balance(const Digest& owner) const {
        Amount total = 0;
        for (const auto& [op, v] : coin_utxos(owner)) total += v;
        return total;
    }

    static void sign_inputs(Transaction& tx, const SecretKey& secret) {
        Digest digest = tx.signing_digest();
        for (auto& in : tx.inputs) in.sig = sign(secret, digest);
    }

    bool submit_tagged(const Transaction& tx, TxTag tag, bool attacker_tx = false) {
        Digest id = tx.txid();
        if (!ledger_->submit_tx(tx).accepted) return false;
        tx_tags_.emplace(id, tag);
        if (attacker_tx) attacker_txids_.insert(id);
        return true;
    }

    /// Gathers inputs worth at least `needed`; returns the built unsigned
    /// inputs and the gathered total, or nullopt when funds fall short.
    std::optional<std::pair<std::vector<TxInput>, Amount>>
    gather(const Digest& owner, Amount needed) const {
        std::vector<TxInput> ins;
        Amount total = 0;
        for (const auto& [op, v] : coin_utxos(owner)) {
            ins.push_back(TxInput{op, Signature{}});
            total += v;
            if (total >= needed) return std::make_pair(ins, total);
        }
        return std::nullopt;
    }

    /// Burn commitment transaction (value may be zero for fee commitments).
    std::optional<Transaction> build_commitment_tx(const KeyPair& owner, Amount burn,
                                                   const Digest& commitment,
                                                   Amount fee) const {
        auto gathered = gather(owner.pub, burn + fee);
        if (!gathered) return std::nullopt;
        Transaction tx;
        tx.inputs = gathered->first;
        tx.outputs.push_back(Output{burn, owner.pub, BurnKind{commitment}});
        Amount change = gathered->second - burn - fee;
        if (change > 0) tx.outputs.push_back(Output{change, owner.pub, CoinKind{}});
        tx.declared_size =
            static_cast<std::uint32_t>(tx.canonical_bytes().size() + 32 * tx.inputs.size());
        sign_inputs(tx, owner.secret);
        return tx;
    }

    /// Coinage-spending commitment: largest coin-second contributions first
    /// until the coinage destroyed at the next block reaches `need`.
    std::optional<Transaction> build_coinage_tx(const KeyPair& owner, Coinage need,
                                                const Digest& commitment) const {
        TimePoint at = ledger_->next_block_time();
        std::vector<std::pair<Coinage, Outpoint>> aged;
        for (const auto& [op, e] : ledger_->utxos()) {
            if (e.output.owner != owner.pub || e.output.is_name()) continue;
            Coinage age = at > e.created_at ? static_cast<Coinage>(at - e.created_at) : 0;
            aged.emplace_back(e.output.value * age, op);
        }
        std::sort(aged.begin(), aged.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        Transaction tx;
        Coinage destroyed = 0;
        Amount in_total = 0;
        for (const auto& [cs, op] : aged) {
            tx.inputs.push_back(TxInput{op, Signature{}});
            destroyed += cs;
            in_total += ledger_->utxos().at(op).output.value;
            if (destroyed >= need) break;
        }
        if (destroyed < need || tx.inputs.empty()) return std::nullopt;
        tx.outputs.push_back(Output{0, owner.pub, BurnKind{commitment}});
        tx.outputs.push_back(Output{in_total, owner.pub, CoinKind{}});
        tx.declared_size =
            static_cast<std::uint32_t>(tx.canonical_bytes().size() + 32 * tx.inputs.size());
        sign_inputs(tx, owner.secret);
        return tx;
    }

    // --- scheduling ----------------------------------------------------------

    void schedule_blocks() {
        for (TimePoint t = sc_.block_interval; t <= sc_.duration; t += sc_.block_interval)
            net_->schedule_block(t);
    }

    void schedule_setup() {
        // phase 1: sellers register their names in one transaction each
        net_->schedule_action(1, [this](Network&, TimePoint) {
            for (std::size_t i = 0; i < sellers_.size(); ++i) {
                const KeyPair& seller = sellers_[i];
                Amount need = sc_.actors.names_per_seller;
                auto gathered = gather(seller.pub, need);
                if (!gathered) continue;
                Transaction tx;
                tx.inputs = gathered->first;
                for (std::uint32_t k = 0; k < sc_.actors.names_per_seller; ++k) {
                    std::string name =
                        "d/s" + std::to_string(i) + "-" + std::to_string(k);
                    tx.outputs.push_back(Output{1, seller.pub, NameKind{name, "v1"}});
                    seller_names_[i].push_back(name);
                }
                Amount change = gathered->second - need;
                if (change > 0) tx.outputs.push_back(Output{change, seller.pub, CoinKind{}});
                tx.declared_size = static_cast<std::uint32_t>(
                    tx.canonical_bytes().size() + 32 * tx.inputs.size());
                sign_inputs(tx, seller.secret);
                submit_tagged(tx, TxTag::Exchange);
            }
        });

        // phase 2 (after the first block): identity/quota preparation
        TimePoint phase2 = sc_.block_interval + 1;
        switch (sc_.policy.kind) {
        case PolicyKind::UtxoIdentity:
            if (sc_.actors.attacker.budget > 0)
                net_->schedule_action(phase2, [this](Network&, TimePoint) {
                    attacker_split_utxos();
                });
            break;
        case PolicyKind::BurnIdentity:
            net_->schedule_action(phase2, [this](Network&, TimePoint) {
                setup_burn_identities();
            });
            break;
        default:
            break;
        }
    }

    void attacker_split_utxos() {
        Amount chunk = std::max<Amount>(1, sc_.policy.min_value);
        Amount budget = coin_balance(attacker_.pub);
        std::uint64_t chunks = std::min<std::uint64_t>(budget / chunk, 10000);
        if (chunks == 0) return;
        auto gathered = gather(attacker_.pub, budget);
        if (!gathered) return;
        Transaction tx;
        tx.inputs = gathered->first;
        for (std::uint64_t i = 0; i < chunks; ++i)
            tx.outputs.push_back(Output{chunk, attacker_.pub, CoinKind{}});
        Amount change = gathered->second - chunks * chunk;
        if (change > 0) tx.outputs.push_back(Output{change, attacker_.pub, CoinKind{}});
        tx.declared_size =
            static_cast<std::uint32_t>(tx.canonical_bytes().size() + 32 * tx.inputs.size());
        sign_inputs(tx, attacker_.secret);
        submit_tagged(tx, TxTag::PolicySetup, true);
    }

    void setup_burn_identities() {
        Amount unit = std::max<Amount>(1, sc_.policy.min_burn);
        // honest sellers need enough grants for their offer cadence
        std::uint64_t seller_grants = static_cast<std::uint64_t>(
            sc_.policy.window / std::max<Duration>(1, sc_.actors.offer_interval) + 1);
        for (const auto& seller : sellers_) {
            Amount burn = unit * seller_grants;
            if (auto tx = build_commitment_tx(seller, burn, seller.pub, 0))
                submit_tagged(*tx, TxTag::PolicySetup);
        }
        for (const auto& buyer : buyers_) {
            if (auto tx = build_commitment_tx(buyer, unit, buyer.pub, 0))
                submit_tagged(*tx, TxTag::PolicySetup);
        }
        if (sc_.actors.attacker.budget > 0) {
            Amount budget = coin_balance(attacker_.pub);
            Amount burn = (budget / unit) * unit;
            if (burn >= unit)
                if (auto tx = build_commitment_tx(attacker_, burn, attacker_.pub, 0))
                    submit_tagged(*tx, TxTag::PolicySetup, true);
        }
    }

    void schedule_sellers() {
        for (std::size_t i = 0; i < sellers_.size(); ++i) {
            for (std::uint32_t k = 0; k < sc_.actors.names_per_seller; ++k) {
                Duration spread = std::min<Duration>(sc_.actors.offer_interval / 4 + 1, 300);
                TimePoint first = sc_.setup_duration +
                                  static_cast<Duration>(i * 17 + k * 5) +
                                  static_cast<Duration>(rng_() % spread);
                for (TimePoint t = first; t <= sc_.duration; t += sc_.actors.offer_interval) {
                    std::string name = "d/s" + std::to_string(i) + "-" + std::to_string(k);
                    net_->schedule_action(t, [this, i, name](Network&, TimePoint now) {
                        post_offer(i, name, now);
                    });
                }
            }
        }
    }

    /// Builds an offer, arranges the policy proof (possibly via the chain),
    /// and broadcasts from the seller's home node.
    void post_offer(std::size_t seller_idx, const std::string& name, TimePoint now) {
        const KeyPair& seller = sellers_[seller_idx];
        auto offer = make_offer(*ledger_, name, sc_.actors.offer_price, seller.pub,
                                now + kDefaultOfferLifetime, seller.secret);
        if (!offer.ok()) return;
        Bytes payload = make_payload(BodyType::Offer, offer->encode());
        P2PMessage msg = make_message(std::move(payload), 120, Proof{NoProof{}});
        offers_.emplace(offer->digest(), OfferState{seller_idx, *offer, false, {}, 0});

        std::uint32_t home = seller_home(seller_idx);
        switch (sc_.policy.kind) {
        case PolicyKind::None:
        case PolicyKind::DirectFee: // offers are not transactions; measured as-is
            broadcast_honest(home, msg, now);
            break;
        case PolicyKind::Hashcash: {
            std::uint64_t d = std::max<std::uint64_t>(1, net_->node(home).policy->knob());
            std::uint64_t n = hashcash_solve(msg.payload, d);
            msg.proof = HashcashProof{d, n};
            broadcast_honest(home, msg, now);
            break;
        }
        case PolicyKind::UtxoIdentity: {
            auto live = ledger_->resolve_name(name);
            if (!live) return;
            msg.proof = UtxoOwnerProof{live->first, sign(seller.secret, msg.digest)};
            broadcast_honest(home, msg, now);
            break;
        }
        case PolicyKind::BurnIdentity:
            msg.proof = BurnIdentityProof{seller.pub, sign(seller.secret, msg.digest)};
            broadcast_honest(home, msg, now);
            break;
        case PolicyKind::IndirectFee: {
            Amount fee = std::max<Amount>(1, net_->node(home).policy->knob());
            auto tx = build_commitment_tx(seller, 0, msg.digest, fee);
            if (!tx || !submit_tagged(*tx, TxTag::PolicyPerMessage)) return;
            msg.proof = FeeTxProof{tx->txid()};
            defer_broadcast(home, msg, now + 2 * sc_.block_interval);
            break;
        }
        case PolicyKind::Coinage: {
            Coinage need = net_->node(home).policy->knob();
            auto tx = build_coinage_tx(seller, need, msg.digest);
            if (!tx) {
                // not enough coinage yet: the honest user simply waits
                TimePoint retry = now + sc_.block_interval;
                if (retry <= sc_.duration)
                    net_->schedule_action(retry, [this, seller_idx, name](Network&,
                                                                          TimePoint t) {
                        post_offer(seller_idx, name, t);
                    });
                offers_.erase(offer->digest());
                return;
            }
            if (!submit_tagged(*tx, TxTag::PolicyPerMessage)) return;
            msg.proof = CoinageTxProof{tx->txid()};
            defer_broadcast(home, msg, now + 2 * sc_.block_interval);
            break;
        }
        }
    }

    void broadcast_honest(std::uint32_t home, const P2PMessage& msg, TimePoint now) {
        honest_sent_.emplace(msg.digest, now);
        net_->broadcast(home, msg);
    }

    void defer_broadcast(std::uint32_t home, P2PMessage msg, TimePoint at) {
        if (at > sc_.duration) return;
        net_->schedule_action(at, [this, home, msg](Network& n, TimePoint now) {
            honest_sent_.emplace(msg.digest, now);
            n.broadcast(home, msg);
        });
    }

    void schedule_buyers() {
        if (buyers_.empty() || sc_.actors.buy_interval < 1) return;
        for (std::size_t b = 0; b < buyers_.size(); ++b) {
            TimePoint first = sc_.setup_duration + sc_.actors.buy_interval +
                              static_cast<Duration>(b * 23);
            for (TimePoint t = first; t <= sc_.duration; t += sc_.actors.buy_interval) {
                net_->schedule_action(
                    t, [this, b](Network&, TimePoint now) { buyer_shop(b, now); });
            }
        }
    }

    void buyer_shop(std::size_t buyer_idx, TimePoint now) {
        const KeyPair& buyer = buyers_[buyer_idx];
        const Node& home = net_->node(buyer_home(buyer_idx));
        const Amount fee = 1;
        for (const auto& [digest, offer] : home.offer_book) {
            if (buyer_taken_[buyer_idx].count(digest)) continue;
            if (!verify_offer(*ledger_, offer, now).valid) continue;
            if (coin_balance(buyer.pub) < offer.price + fee) continue;

            std::vector<Outpoint> funding;
            Amount gathered = 0;
            for (const auto& [op, v] : coin_utxos(buyer.pub)) {
                funding.push_back(op);
                gathered += v;
                if (gathered >= offer.price + fee) break;
            }
            auto partial = build_take(*ledger_, offer, buyer.secret, funding, fee, now);
            if (!partial.ok()) continue;
            buyer_taken_[buyer_idx].insert(digest);

            Bytes payload = make_payload(BodyType::Take, partial->encode());
            P2PMessage msg = make_message(std::move(payload),
                                          static_cast<std::uint32_t>(partial->tx.declared_size),
                                          Proof{NoProof{}});
            attach_buyer_proof(msg, buyer, *partial);
            broadcast_honest(buyer_home(buyer_idx), msg, now);
            break; // one take per shopping trip
        }
    }

    /// The buyer's quota identity is the coin input paying the price.
    void attach_buyer_proof(P2PMessage& msg, const KeyPair& buyer,
                            const PartialTradeTx& partial) {
        switch (sc_.policy.kind) {
        case PolicyKind::UtxoIdentity:
            msg.proof =
                UtxoOwnerProof{partial.tx.inputs[0].prevout, sign(buyer.secret, msg.digest)};
            break;
        case PolicyKind::BurnIdentity:
            msg.proof = BurnIdentityProof{buyer.pub, sign(buyer.secret, msg.digest)};
            break;
        case PolicyKind::Hashcash: {
            std::uint64_t d = std::max<std::uint64_t>(
                1, net_->node(buyer_home(0)).policy->knob());
            msg.proof = HashcashProof{d, hashcash_solve(msg.payload, d)};
            break;
        }
        case PolicyKind::IndirectFee: {
            Amount fee = std::max<Amount>(1, sc_.policy.min_fee);
            auto tx = build_commitment_tx(buyer, 0, msg.digest, fee);
            if (tx && submit_tagged(*tx, TxTag::PolicyPerMessage))
                msg.proof = FeeTxProof{tx->txid()};
            break;
        }
        case PolicyKind::Coinage: {
            auto tx = build_coinage_tx(buyer, sc_.policy.min_coinage, msg.digest);
            if (tx && submit_tagged(*tx, TxTag::PolicyPerMessage))
                msg.proof = CoinageTxProof{tx->txid()};
            break;
        }
        default:
            break;
        }
    }

    // --- attacker ------------------------------------------------------------

    void schedule_attacker() {
        const AttackerSpec& atk = sc_.actors.attacker;
        if (atk.budget == 0 || atk.rate_per_hour == 0) return;

        TimePoint start = sc_.setup_duration;
        Duration step = std::max<Duration>(1, 3600 / static_cast<Duration>(atk.rate_per_hour));
        if (atk.strategy == AttackStrategy::BurstThenWait) {
            start = sc_.setup_duration + (sc_.duration - sc_.setup_duration) / 2;
            step = 1;
        }
        std::uint64_t counter = 0;
        for (TimePoint t = start; t <= sc_.duration; t += step) {
            std::uint64_t payload_seed = rng_();
            net_->schedule_action(t, [this, payload_seed, counter](Network&, TimePoint now) {
                attacker_attempt(payload_seed, counter, now);
            });
            ++counter;
        }
    }

    void attacker_attempt(std::uint64_t payload_seed, std::uint64_t counter, TimePoint now) {
        std::mt19937_64 prng(payload_seed);
        Bytes body(sc_.actors.attacker.spam_size);
        for (auto& b : body) b = static_cast<std::uint8_t>(prng());
        P2PMessage msg = make_message(make_payload(BodyType::Blob, body),
                                      sc_.actors.attacker.spam_size, Proof{NoProof{}});

        switch (sc_.policy.kind) {
        case PolicyKind::None:
            break;
        case PolicyKind::Hashcash: {
            // the attacker adapts to the floor it observes at a peer, up to
            // the hardest puzzle its hardware can solve
            const auto& peers = net_->node(attacker_home()).peers;
            std::uint32_t observed_at = peers.empty() ? attacker_home() : peers.front();
            std::uint64_t floor_d = net_->node(observed_at).policy->knob();
            std::uint64_t d = std::max<std::uint64_t>(1, floor_d);
            d = std::min(d, std::max<std::uint64_t>(1, sc_.actors.attacker.max_pow));
            std::uint64_t n = hashcash_solve(msg.payload, d);
            attacker_hashes_ += n + 1;
            msg.proof = HashcashProof{d, n};
            break;
        }
        case PolicyKind::UtxoIdentity: {
            auto utxos = coin_utxos(attacker_.pub);
            if (!utxos.empty()) {
                const Outpoint& op = utxos[counter % utxos.size()].first;
                msg.proof = UtxoOwnerProof{op, sign(attacker_.secret, msg.digest)};
            }
            break;
        }
        case PolicyKind::BurnIdentity:
            msg.proof = BurnIdentityProof{attacker_.pub, sign(attacker_.secret, msg.digest)};
            break;
        case PolicyKind::IndirectFee: {
            Amount fee = std::max<Amount>(1, net_->node(attacker_home()).policy->knob());
            auto tx = build_commitment_tx(attacker_, 0, msg.digest, fee);
            if (tx && submit_tagged(*tx, TxTag::PolicyPerMessage, true)) {
                msg.proof = FeeTxProof{tx->txid()};
                defer_inject(msg, now + 2 * sc_.block_interval);
                return;
            }
            break; // broke: flood with a proofless message anyway
        }
        case PolicyKind::Coinage: {
            Coinage need = net_->node(attacker_home()).policy->knob();
            auto tx = build_coinage_tx(attacker_, need, msg.digest);
            if (tx && submit_tagged(*tx, TxTag::PolicyPerMessage, true)) {
                msg.proof = CoinageTxProof{tx->txid()};
                defer_inject(msg, now + 2 * sc_.block_interval);
                return;
            }
            break; // coinage exhausted: flood continues without backing
        }
        case PolicyKind::DirectFee: {
            Amount fee = (net_->node(attacker_home()).policy->knob() *
                              sc_.actors.attacker.spam_size +
                          999) /
                         1000;
            auto gathered = gather(attacker_.pub, fee + 1);
            if (gathered) {
                Transaction tx;
                tx.inputs = gathered->first;
                tx.outputs.push_back(Output{gathered->second - fee, attacker_.pub, CoinKind{}});
                tx.declared_size = sc_.actors.attacker.spam_size;
                sign_inputs(tx, attacker_.secret);
                attacker_txids_.insert(tx.txid());
                msg = make_message(make_payload(BodyType::Tx, encode_tx_wire(tx)),
                                   sc_.actors.attacker.spam_size, Proof{NoProof{}});
            }
            break;
        }
        }
        spam_attempts_++;
        spam_digests_.insert(msg.digest);
        net_->inject(attacker_home(), msg);
    }

    void defer_inject(P2PMessage msg, TimePoint at) {
        spam_attempts_++;
        spam_digests_.insert(msg.digest);
        if (at > sc_.duration) return;
        net_->schedule_action(at, [this, msg](Network& n, TimePoint) {
            n.inject(attacker_home(), msg);
        });
    }

    // --- controller -----------------------------------------------------------

    void schedule_controller() {
        trajectory_.emplace_back(0, net_->node(0).policy->knob());
        if (sc_.policy.controller_target == 0) return;
        for (TimePoint t = sc_.policy.window; t <= sc_.duration; t += sc_.policy.window) {
            net_->schedule_action(t, [this](Network& n, TimePoint now) {
                n.apply_controller(sc_.policy.controller_target);
                trajectory_.emplace_back(now, n.node(0).policy->knob());
            });
        }
    }

    // --- message effects -------------------------------------------------------

    void on_accept(Network&, std::uint32_t node, const P2PMessage& msg, TimePoint at) {
        first_seen_[msg.digest].emplace(node, at);

        // sellers react to takes arriving at their home node
        if (payload_type(msg.payload) != BodyType::Take) return;
        auto partial = PartialTradeTx::decode(payload_body(msg.payload));
        if (!partial) return;
        auto it = offers_.find(partial->offer_digest);
        if (it == offers_.end()) return;
        OfferState& state = it->second;
        if (node != seller_home(state.seller)) return;

        Amount paid = 0;
        for (const auto& o : partial->tx.outputs)
            if (!o.is_name() && !o.is_burn() && o.owner == state.offer.payout_address)
                paid += o.value;
        if (!state.best_take || paid > state.best_paid) {
            state.best_take = *partial;
            state.best_paid = paid;
        }
        if (!state.sign_scheduled) {
            state.sign_scheduled = true;
            Digest offer_digest = it->first;
            TimePoint sign_at = at + 30; // gather competing takes briefly
            if (sign_at <= sc_.duration)
                net_->schedule_action(sign_at, [this, offer_digest](Network&, TimePoint) {
                    seller_sign_best(offer_digest);
                });
        }
    }

    /// The seller picks the candidate paying the most and completes it.
    void seller_sign_best(const Digest& offer_digest) {
        auto it = offers_.find(offer_digest);
        if (it == offers_.end() || !it->second.best_take) return;
        OfferState& state = it->second;
        auto full = seller_verify_and_sign(*ledger_, *state.best_take, state.offer,
                                           sellers_[state.seller].secret);
        if (!full.ok()) return;
        if (submit_tagged(*full, TxTag::Exchange)) trade_txids_.insert(full->txid());
    }

    // --- report assembly --------------------------------------------------------

    RunResult assemble() {
        ScenarioReport r;
        r.scenario_name = sc_.name;
        r.policy = std::string(to_string(sc_.policy.kind));
        r.seed = sc_.seed;
        r.duration = sc_.duration;
        r.scenario_echo = render_scenario(sc_);

        for (std::uint32_t i = 0; i < node_count(); ++i) {
            const Node& n = net_->node(i);
            NodeCounters c;
            c.admitted = n.admitted;
            c.rejected = n.rejected;
            r.nodes.push_back(std::move(c));
            r.admitted_total += n.admitted;
            r.rejected_total += r.nodes.back().rejected_total();
        }
        for (const auto& rec : net_->trace())
            if (rec.decision == "relay" || rec.decision == "drop") r.decisions_total++;

        // honest delivery and latency
        r.honest_sent = honest_sent_.size();
        std::vector<TimePoint> latencies;
        for (const auto& [digest, sent_at] : honest_sent_) {
            auto seen = first_seen_.find(digest);
            if (seen == first_seen_.end() || seen->second.size() < node_count()) continue;
            r.honest_delivered_all++;
            TimePoint last = 0;
            for (const auto& [node, at] : seen->second) last = std::max(last, at - sent_at);
            latencies.push_back(last);
        }
        for (const auto& txid : trade_txids_)
            if (ledger_->confirmed(txid)) r.trades_settled++;
        r.delivery_ratio = r.honest_sent == 0
                               ? Rational(1)
                               : Rational(static_cast<std::int64_t>(r.honest_delivered_all),
                                          static_cast<std::int64_t>(r.honest_sent));
        if (!latencies.empty()) {
            std::sort(latencies.begin(), latencies.end());
            r.latency.p50 = latencies[(latencies.size() - 1) / 2];
            r.latency.p90 = latencies[(latencies.size() - 1) * 9 / 10];
            r.latency.max = latencies.back();
        }

        // spam accounting
        r.spam_attempts = spam_attempts_;
        std::map<std::pair<std::uint32_t, TimePoint>, std::uint64_t> per_node_window;
        for (const auto& digest : spam_digests_) {
            auto seen = first_seen_.find(digest);
            if (seen == first_seen_.end()) continue;
            r.spam_messages_admitted++;
            for (const auto& [node, at] : seen->second) {
                r.spam_admitted_total++;
                per_node_window[{node, at / sc_.policy.window}]++;
            }
        }
        for (const auto& [key, count] : per_node_window)
            r.spam_admitted_max_per_node_window =
                std::max(r.spam_admitted_max_per_node_window, count);

        // attacker spend, read back from the chain
        for (const auto& txid : attacker_txids_) {
            const ConfirmedTx* rec = ledger_->confirmed(txid);
            if (!rec) continue;
            r.attacker.fees += rec->fee;
            for (const auto& o : rec->tx.outputs)
                if (o.is_burn()) r.attacker.burned += o.value;
            r.attacker.coinage_destroyed += rec->coinage_destroyed;
        }
        r.attacker.hash_attempts = attacker_hashes_;
        r.attacker.messages_attempted = spam_attempts_;
        if (sc_.policy.kind == PolicyKind::UtxoIdentity)
            r.attacker.capital_locked = sc_.actors.attacker.budget;

        // chain bytes by purpose
        for (const auto& block : ledger_->blocks()) {
            for (const auto& tx : block.txs) {
                std::uint64_t bytes = tx.declared_size;
                r.chain.total += bytes;
                auto tag = tx_tags_.find(tx.txid());
                if (tag == tx_tags_.end()) {
                    r.chain.funding += bytes;
                    continue;
                }
                switch (tag->second) {
                case TxTag::PolicySetup: r.chain.policy_setup += bytes; break;
                case TxTag::PolicyPerMessage: r.chain.policy_per_message += bytes; break;
                case TxTag::Exchange: r.chain.exchange += bytes; break;
                case TxTag::Funding: r.chain.funding += bytes; break;
                }
            }
        }
        r.usage = classify_chain_usage(r.chain, sc_.policy.kind == PolicyKind::DirectFee);

        r.threshold_trajectory = trajectory_;
        r.trace_digest = net_->trace_digest();
        return RunResult{std::move(r), net_->render_trace()};
    }

    struct OfferState {
        std::size_t seller{0};
        SellOffer offer;
        bool sign_scheduled{false};
        std::optional<PartialTradeTx> best_take;
        Amount best_paid{0};
    };

    Scenario sc_;
    std::mt19937_64 rng_;
    std::shared_ptr<KeyRegistry> keys_ = std::make_shared<KeyRegistry>();
    std::unique_ptr<Ledger> ledger_;
    std::unique_ptr<Network> net_;
    KeyPair miner_, reserve_, attacker_;
    std::vector<KeyPair> sellers_, buyers_;
    std::map<std::size_t, std::vector<std::string>> seller_names_;
    std::vector<std::set<Digest>> buyer_taken_;

    std::map<Digest, TxTag> tx_tags_;
    std::map<Digest, TimePoint> honest_sent_;
    std::set<Digest> spam_digests_;
    std::uint64_t spam_attempts_{0};
    std::map<Digest, std::map<std::uint32_t, TimePoint>> first_seen_;
    std::set<Digest> attacker_txids_;
    std::set<Digest> trade_txids_;
    std::uint64_t attacker_hashes_{0};
    std::vector<std::pair<TimePoint, std::uint64_t>> trajectory_;
    std::map<Digest, OfferState> offers_;
};

} // namespace harness_detail

/// Runs one scenario end to end; deterministic per seed.
inline RunResult run_scenario(const Scenario& sc) {
    validate_scenario(sc);
    return harness_detail::Runner(sc).run();
}

/// Runs the template once per policy and assembles the comparison matrix.
/// Rows keep the input order.
inline ComparisonMatrix compare_policies(const Scenario& tmpl,
                                         const std::vector<std::string>& policies) {
    ComparisonMatrix matrix;
    for (const auto& name : policies) {
        auto kind = policy_kind_from_string(name);
        if (!kind) throw ValidationError("policy.kind", "unknown policy '" + name + "'");
        Scenario sc = tmpl;
        sc.policy.kind = *kind;
        RunResult result = run_scenario(sc);
        const ScenarioReport& rep = result.report;

        PolicyRow row;
        row.policy = name;
        row.usage = rep.usage;
        row.chain = rep.chain;
        row.spam_admitted_total = rep.spam_admitted_total;
        row.spam_admitted_max_per_node_window = rep.spam_admitted_max_per_node_window;
        row.delivery_ratio = rep.delivery_ratio;
        std::int64_t denom =
            rep.spam_messages_admitted == 0
                ? 1
                : static_cast<std::int64_t>(rep.spam_messages_admitted);
        row.attacker_cost_per_admitted =
            Rational(static_cast<std::int64_t>(rep.attacker.fees + rep.attacker.burned +
                                               rep.attacker.capital_locked),
                     denom);
        row.hashes_per_admitted =
            rep.spam_messages_admitted == 0
                ? rep.attacker.hash_attempts
                : rep.attacker.hash_attempts / rep.spam_messages_admitted;
        row.coinage_per_admitted =
            rep.spam_messages_admitted == 0
                ? rep.attacker.coinage_destroyed
                : rep.attacker.coinage_destroyed / rep.spam_messages_admitted;
        matrix.rows.push_back(std::move(row));
        matrix.reports.push_back(std::move(result.report));
    }
    return matrix;
}

} // namespace floodgate
