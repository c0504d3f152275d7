// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "floodgate/expected.hpp"
#include "floodgate/ledger.hpp"
#include "floodgate/message.hpp"

namespace floodgate {

enum class CheckMode {
    Probe,   // read-only: no claim or quota is consumed
    Consume, // admission consumes the claim / quota grant
};

// --- hashcash ----------------------------------------------------------------

namespace hashcash {

/// 256-bit big-endian limbs of floor(2^256 / d) for d >= 2. For d == 1 the
/// bound 2^256/d exceeds every digest, so callers special-case it.
inline std::array<std::uint64_t, 4> target_for(std::uint64_t d) {
    std::array<std::uint64_t, 4> q{};
    unsigned __int128 rem = 0;
    // binary long division of 2^256 (bit 256 set, rest zero) by d
    for (int bit = 256; bit >= 0; --bit) {
        rem = (rem << 1) | (bit == 256 ? 1 : 0);
        if (rem >= d) {
            rem -= d;
            if (bit < 256) q[3 - bit / 64] |= (std::uint64_t{1} << (bit % 64));
        }
    }
    return q;
}

inline std::array<std::uint64_t, 4> digest_limbs(const Digest& d) {
    std::array<std::uint64_t, 4> out{};
    for (int i = 0; i < 4; ++i) {
        std::uint64_t v = 0;
        for (int j = 0; j < 8; ++j) v = (v << 8) | d.v[8 * i + j];
        out[i] = v;
    }
    return out;
}

inline Digest pow_digest(ByteView payload, std::uint64_t d, std::uint64_t n) {
    Bytes buf;
    buf.reserve(payload.size() + 16);
    append_bytes(buf, payload);
    append_u64(buf, d);
    append_u64(buf, n);
    return hash(buf);
}

/// True iff hash(payload || d || n), read as a 256-bit big-endian integer,
/// is <= 2^256 / d. One hash evaluation regardless of d.
inline bool valid(ByteView payload, std::uint64_t d, std::uint64_t n) {
    if (d == 0) return false;
    Digest dg = pow_digest(payload, d, n);
    if (d == 1) return true;
    return digest_limbs(dg) <= target_for(d);
}

} // namespace hashcash

/// Brute-force nonce search in order n = 0, 1, 2, ... Expected d attempts.
inline std::uint64_t hashcash_solve(ByteView payload, std::uint64_t d) {
    for (std::uint64_t n = 0;; ++n)
        if (hashcash::valid(payload, d, n)) return n;
}

/// Admission by proof-of-work: requires d >= floor_d and a valid nonce.
/// Priority is the difficulty the sender chose.
inline AdmissionDecision hashcash_check(const P2PMessage& msg, std::uint64_t d,
                                        std::uint64_t n, std::uint64_t floor_d) {
    if (d < 1) return AdmissionDecision::reject(RejectReason::InvalidPoW);
    if (d < floor_d) return AdmissionDecision::reject(RejectReason::BelowDifficultyFloor);
    if (!hashcash::valid(msg.payload, d, n))
        return AdmissionDecision::reject(RejectReason::InvalidPoW);
    return AdmissionDecision::admit(Rational(static_cast<std::int64_t>(d)));
}

// --- fee and coinage checks ---------------------------------------------------

/// Relay rule for transactions on the currency network itself: fee rate at
/// least `min_rate`. Pre: tx validates against the view.
inline AdmissionDecision direct_fee_check(const Transaction& tx, const Ledger& view,
                                          const Rational& min_rate) {
    auto rate = view.fee_rate(tx);
    if (!rate) return AdmissionDecision::reject(RejectReason::InvalidTx);
    if (*rate < min_rate) return AdmissionDecision::reject(RejectReason::FeeTooLow);
    return AdmissionDecision::admit(*rate);
}

/// Fee paid on the chain for a message on another network: the referenced
/// confirmed transaction must burn-commit to the message digest, pay at
/// least `min_fee`, and the commitment must be unclaimed. A claim is
/// consumed once, so one fee payment can never cover two messages.
inline AdmissionDecision indirect_fee_check(const P2PMessage& msg, const Ledger& view,
                                            Amount min_fee, std::set<Digest>& claims,
                                            CheckMode mode = CheckMode::Consume) {
    const auto* proof = std::get_if<FeeTxProof>(&msg.proof);
    if (!proof) return AdmissionDecision::reject(RejectReason::WrongProofKind);
    const ConfirmedTx* rec = view.confirmed(proof->txid);
    if (!rec) return AdmissionDecision::reject(RejectReason::TxNotFound);
    bool committed = false;
    for (const auto& o : rec->tx.outputs)
        if (const auto* b = o.burn())
            if (b->commitment == msg.digest) committed = true;
    if (!committed) return AdmissionDecision::reject(RejectReason::NoCommitment);
    if (rec->fee < min_fee) return AdmissionDecision::reject(RejectReason::FeeTooLow);
    if (claims.count(msg.digest)) return AdmissionDecision::reject(RejectReason::AlreadyClaimed);
    if (mode == CheckMode::Consume) claims.insert(msg.digest);
    return AdmissionDecision::admit(
        Rational(static_cast<std::int64_t>(rec->fee), rec->tx.declared_size));
}

/// Like the indirect fee, but the referenced transaction must have
/// destroyed at least `min_coinage` coin-seconds. Priority is destroyed
/// coinage per declared message byte.
inline AdmissionDecision coinage_check(const P2PMessage& msg, const Ledger& view,
                                       Coinage min_coinage, std::set<Digest>& claims,
                                       CheckMode mode = CheckMode::Consume) {
    const auto* proof = std::get_if<CoinageTxProof>(&msg.proof);
    if (!proof) return AdmissionDecision::reject(RejectReason::WrongProofKind);
    const ConfirmedTx* rec = view.confirmed(proof->txid);
    if (!rec) return AdmissionDecision::reject(RejectReason::TxNotFound);
    bool committed = false;
    for (const auto& o : rec->tx.outputs)
        if (const auto* b = o.burn())
            if (b->commitment == msg.digest) committed = true;
    if (!committed) return AdmissionDecision::reject(RejectReason::NoCommitment);
    if (rec->coinage_destroyed < min_coinage)
        return AdmissionDecision::reject(RejectReason::InsufficientCoinage);
    if (claims.count(msg.digest)) return AdmissionDecision::reject(RejectReason::AlreadyClaimed);
    if (mode == CheckMode::Consume) claims.insert(msg.digest);
    return AdmissionDecision::admit(
        Rational(static_cast<std::int64_t>(rec->coinage_destroyed), msg.declared_size));
}

// --- quota accounting ----------------------------------------------------------

/// Rolling-window grant tracker. Keys are 32-byte digests: an identity
/// digest directly, or hash(outpoint wire form) for UTXO keys. A grant at
/// time t counts against every now in [t, t + window).
class QuotaLedger {
public:
    explicit QuotaLedger(Duration window = 3600) : window_(window) {}

    Duration window() const { return window_; }

    static Digest utxo_key(const Outpoint& op) { return hash(op.encode()); }

    std::uint64_t used_in_window(const Digest& key, TimePoint now) const {
        auto it = used_.find(key);
        if (it == used_.end()) return 0;
        std::uint64_t n = 0;
        for (TimePoint t : it->second)
            if (t > now - window_ && t <= now) ++n;
        return n;
    }

    void consume(const Digest& key, TimePoint now) {
        auto& stamps = used_[key];
        // drop grants that have left every relevant window
        std::erase_if(stamps, [&](TimePoint t) { return t <= now - window_; });
        stamps.push_back(now);
    }

private:
    Duration window_;
    std::map<Digest, std::vector<TimePoint>> used_;
};

/// Proof-of-burn identity book: total provably destroyed value per
/// identity. Each (transaction, identity) registration is counted once.
struct BurnRegistry {
    std::map<Digest, Amount> burned;
    std::set<std::pair<Digest, Digest>> counted; // (txid, identity)

    Amount burned_for(const Digest& identity) const {
        auto it = burned.find(identity);
        return it == burned.end() ? 0 : it->second;
    }
};

/// Registers (or tops up) a burn identity from a confirmed transaction that
/// burn-commits to it. Grants per window are floor(burned / min_burn): the
/// simplest monotone step rule. Returns the identity's grant count.
inline Expected<std::uint64_t, RejectReason>
burn_identity_register(const Ledger& view, const Digest& txid, const Digest& identity,
                       Amount min_burn, BurnRegistry& registry) {
    const ConfirmedTx* rec = view.confirmed(txid);
    if (!rec) return RejectReason::TxNotFound;
    Amount burned = 0;
    bool committed = false;
    for (const auto& o : rec->tx.outputs) {
        if (const auto* b = o.burn()) {
            if (b->commitment == identity) {
                committed = true;
                burned += o.value;
            }
        }
    }
    if (!committed) return RejectReason::NoBurnOutput;
    if (min_burn > 0 && burned < min_burn) return RejectReason::BurnTooSmall;
    if (!registry.counted.count({txid, identity})) {
        registry.counted.insert({txid, identity});
        registry.burned[identity] += burned;
    }
    return min_burn == 0 ? ~std::uint64_t{0}
                         : registry.burned_for(identity) / min_burn;
}

/// Quota by UTXO ownership: the proof outpoint must be live, worth at least
/// `min_value` (name outputs qualify at any value), and signed by its owner
/// over the message digest. Each outpoint gets `grants` messages per window.
inline AdmissionDecision utxo_identity_check(const P2PMessage& msg, const Ledger& view,
                                             TimePoint now, Amount min_value,
                                             QuotaLedger& quota, std::uint64_t grants,
                                             CheckMode mode = CheckMode::Consume) {
    const auto* proof = std::get_if<UtxoOwnerProof>(&msg.proof);
    if (!proof) return AdmissionDecision::reject(RejectReason::WrongProofKind);
    auto it = view.utxos().find(proof->outpoint);
    if (it == view.utxos().end())
        return AdmissionDecision::reject(RejectReason::UtxoNotFound);
    const Output& out = it->second.output;
    if (!out.is_name() && out.value < min_value)
        return AdmissionDecision::reject(RejectReason::ValueTooSmall);
    if (!view.keys().verify(out.owner, msg.digest, proof->sig))
        return AdmissionDecision::reject(RejectReason::BadSignature);
    Digest key = QuotaLedger::utxo_key(proof->outpoint);
    std::uint64_t used = quota.used_in_window(key, now);
    if (used >= grants) return AdmissionDecision::reject(RejectReason::QuotaExhausted);
    if (mode == CheckMode::Consume) quota.consume(key, now);
    return AdmissionDecision::admit(Rational(static_cast<std::int64_t>(grants - used)));
}

// --- the uniform policy contract -----------------------------------------------

enum class PolicyKind {
    None,
    DirectFee,
    IndirectFee,
    Hashcash,
    Coinage,
    BurnIdentity,
    UtxoIdentity,
};

inline std::string_view to_string(PolicyKind k) {
    switch (k) {
    case PolicyKind::None: return "none";
    case PolicyKind::DirectFee: return "direct_fee";
    case PolicyKind::IndirectFee: return "indirect_fee";
    case PolicyKind::Hashcash: return "hashcash";
    case PolicyKind::Coinage: return "coinage";
    case PolicyKind::BurnIdentity: return "burn";
    case PolicyKind::UtxoIdentity: return "utxo";
    }
    return "unknown";
}

/// Multiplicative-increase / multiplicative-decrease threshold control:
/// over target doubles the knob, under target decays it by 9/10 toward the
/// configured base, never below base. Integer arithmetic throughout.
inline std::uint64_t adjust_threshold(std::uint64_t current, std::uint64_t base,
                                      std::uint64_t admitted, std::uint64_t target) {
    if (admitted > target) {
        std::uint64_t c = current == 0 ? 1 : current;
        return c > (~std::uint64_t{0} >> 1) ? ~std::uint64_t{0} : c * 2;
    }
    if (admitted < target) {
        std::uint64_t decayed = current / 10 * 9 + (current % 10) * 9 / 10;
        return std::max(base, decayed);
    }
    return current;
}

/// A node-local admission rule: decides whether to process/relay a message
/// and with what priority. `admit` in Probe mode must be side-effect free;
/// Consume mode additionally books claims/quota on success. The knob is the
/// policy's controlling quantity, adjusted under load.
class AdmissionPolicy {
public:
    virtual ~AdmissionPolicy() = default;

    virtual PolicyKind kind() const = 0;
    std::string_view name() const { return to_string(kind()); }

    virtual AdmissionDecision admit(const P2PMessage& msg, const Ledger& view,
                                    TimePoint now, CheckMode mode) = 0;

    /// Called for every transaction confirmed into a block; policies that
    /// track chain state (burn identities) pick registrations up here.
    virtual void observe_confirmed_tx(const Ledger&, const Digest&) {}

    std::uint64_t knob() const { return knob_; }
    std::uint64_t base_knob() const { return base_knob_; }

    /// Feeds one window's load signal into the MIMD controller.
    void apply_load_signal(std::uint64_t admitted, std::uint64_t target) {
        knob_ = adjust_threshold(knob_, base_knob_, admitted, target);
    }

protected:
    explicit AdmissionPolicy(std::uint64_t base) : knob_(base), base_knob_(base) {}

    std::uint64_t knob_;
    std::uint64_t base_knob_;
};

/// Baseline: admits everything at priority 0.
class NonePolicy final : public AdmissionPolicy {
public:
    NonePolicy() : AdmissionPolicy(0) {}
    PolicyKind kind() const override { return PolicyKind::None; }
    AdmissionDecision admit(const P2PMessage&, const Ledger&, TimePoint,
                            CheckMode) override {
        return AdmissionDecision::admit(Rational(0));
    }
};

class HashcashPolicy final : public AdmissionPolicy {
public:
    explicit HashcashPolicy(std::uint64_t floor_d) : AdmissionPolicy(floor_d) {}
    PolicyKind kind() const override { return PolicyKind::Hashcash; }

    AdmissionDecision admit(const P2PMessage& msg, const Ledger&, TimePoint,
                            CheckMode) override {
        const auto* p = std::get_if<HashcashProof>(&msg.proof);
        if (!p) return AdmissionDecision::reject(RejectReason::WrongProofKind);
        return hashcash_check(msg, p->difficulty, p->nonce, knob_);
    }
};

/// Direct fee on the currency network: the payload must be a transaction;
/// the knob is the minimum fee rate in milli-units per byte.
class DirectFeePolicy final : public AdmissionPolicy {
public:
    explicit DirectFeePolicy(std::uint64_t min_rate_millis)
        : AdmissionPolicy(min_rate_millis) {}
    PolicyKind kind() const override { return PolicyKind::DirectFee; }

    Rational min_rate() const { return Rational(static_cast<std::int64_t>(knob_), 1000); }

    AdmissionDecision admit(const P2PMessage& msg, const Ledger& view, TimePoint,
                            CheckMode) override {
        if (!std::holds_alternative<NoProof>(msg.proof))
            return AdmissionDecision::reject(RejectReason::WrongProofKind);
        if (payload_type(msg.payload) != BodyType::Tx)
            return AdmissionDecision::reject(RejectReason::InvalidPayload);
        auto tx = decode_tx_wire(payload_body(msg.payload));
        if (!tx) return AdmissionDecision::reject(RejectReason::InvalidPayload);
        if (view.validate_tx(*tx))
            return AdmissionDecision::reject(RejectReason::InvalidTx);
        return direct_fee_check(*tx, view, min_rate());
    }
};

class IndirectFeePolicy final : public AdmissionPolicy {
public:
    explicit IndirectFeePolicy(Amount min_fee) : AdmissionPolicy(min_fee) {}
    PolicyKind kind() const override { return PolicyKind::IndirectFee; }

    AdmissionDecision admit(const P2PMessage& msg, const Ledger& view, TimePoint,
                            CheckMode mode) override {
        return indirect_fee_check(msg, view, knob_, claims_, mode);
    }

    const std::set<Digest>& claims() const { return claims_; }

private:
    std::set<Digest> claims_;
};

class CoinagePolicy final : public AdmissionPolicy {
public:
    explicit CoinagePolicy(Coinage min_coinage) : AdmissionPolicy(min_coinage) {}
    PolicyKind kind() const override { return PolicyKind::Coinage; }

    AdmissionDecision admit(const P2PMessage& msg, const Ledger& view, TimePoint,
                            CheckMode mode) override {
        return coinage_check(msg, view, knob_, claims_, mode);
    }

    const std::set<Digest>& claims() const { return claims_; }

private:
    std::set<Digest> claims_;
};

class BurnIdentityPolicy final : public AdmissionPolicy {
public:
    BurnIdentityPolicy(Amount min_burn, Duration window = 3600)
        : AdmissionPolicy(min_burn), quota_(window) {}
    PolicyKind kind() const override { return PolicyKind::BurnIdentity; }

    Expected<std::uint64_t, RejectReason> register_identity(const Ledger& view,
                                                            const Digest& txid,
                                                            const Digest& identity) {
        return burn_identity_register(view, txid, identity, knob_, registry_);
    }

    /// Chain scan: any confirmed burn commitment large enough to register
    /// counts as an identity registration.
    void observe_confirmed_tx(const Ledger& view, const Digest& txid) override {
        const ConfirmedTx* rec = view.confirmed(txid);
        if (!rec) return;
        std::set<Digest> commitments;
        for (const auto& o : rec->tx.outputs)
            if (const auto* b = o.burn()) commitments.insert(b->commitment);
        for (const auto& identity : commitments)
            (void)burn_identity_register(view, txid, identity, knob_, registry_);
    }

    /// Grants per window under the current knob (0 when unregistered).
    std::uint64_t grants(const Digest& identity) const {
        if (knob_ == 0) return ~std::uint64_t{0};
        return registry_.burned_for(identity) / knob_;
    }

    AdmissionDecision admit(const P2PMessage& msg, const Ledger& view, TimePoint now,
                            CheckMode mode) override {
        const auto* p = std::get_if<BurnIdentityProof>(&msg.proof);
        if (!p) return AdmissionDecision::reject(RejectReason::WrongProofKind);
        if (registry_.burned_for(p->identity) == 0)
            return AdmissionDecision::reject(RejectReason::UnknownIdentity);
        std::uint64_t allowed = grants(p->identity);
        if (allowed == 0) // burn no longer meets the raised per-grant price
            return AdmissionDecision::reject(RejectReason::BurnTooSmall);
        if (!view.keys().verify(p->identity, msg.digest, p->sig))
            return AdmissionDecision::reject(RejectReason::BadSignature);
        std::uint64_t used = quota_.used_in_window(p->identity, now);
        if (used >= allowed)
            return AdmissionDecision::reject(RejectReason::QuotaExhausted);
        if (mode == CheckMode::Consume) quota_.consume(p->identity, now);
        return AdmissionDecision::admit(Rational(static_cast<std::int64_t>(allowed - used)));
    }

private:
    BurnRegistry registry_;
    QuotaLedger quota_;
};

class UtxoIdentityPolicy final : public AdmissionPolicy {
public:
    UtxoIdentityPolicy(Amount min_value, Duration window = 3600, std::uint64_t grants = 1)
        : AdmissionPolicy(min_value), quota_(window), grants_(grants) {}
    PolicyKind kind() const override { return PolicyKind::UtxoIdentity; }

    std::uint64_t grants_per_window() const { return grants_; }

    AdmissionDecision admit(const P2PMessage& msg, const Ledger& view, TimePoint now,
                            CheckMode mode) override {
        return utxo_identity_check(msg, view, now, knob_, quota_, grants_, mode);
    }

private:
    QuotaLedger quota_;
    std::uint64_t grants_;
};

/// Parameters for building a policy instance; one per node in the netsim.
struct PolicySpec {
    PolicyKind kind{PolicyKind::None};
    std::uint64_t hashcash_floor{8};
    std::uint64_t min_rate_millis{1000}; // direct fee: 1 unit/byte
    Amount min_fee{1};
    Coinage min_coinage{1000};
    Amount min_burn{1};
    Amount min_value{1};
    Duration window{3600};
    std::uint64_t grants{1};
    std::uint64_t controller_target{0}; // messages per window; 0 disables
};

inline std::unique_ptr<AdmissionPolicy> make_policy(const PolicySpec& spec) {
    switch (spec.kind) {
    case PolicyKind::None: return std::make_unique<NonePolicy>();
    case PolicyKind::Hashcash: return std::make_unique<HashcashPolicy>(spec.hashcash_floor);
    case PolicyKind::DirectFee: return std::make_unique<DirectFeePolicy>(spec.min_rate_millis);
    case PolicyKind::IndirectFee: return std::make_unique<IndirectFeePolicy>(spec.min_fee);
    case PolicyKind::Coinage: return std::make_unique<CoinagePolicy>(spec.min_coinage);
    case PolicyKind::BurnIdentity:
        return std::make_unique<BurnIdentityPolicy>(spec.min_burn, spec.window);
    case PolicyKind::UtxoIdentity:
        return std::make_unique<UtxoIdentityPolicy>(spec.min_value, spec.window, spec.grants);
    }
    return std::make_unique<NonePolicy>();
}

inline std::optional<PolicyKind> policy_kind_from_string(std::string_view s) {
    if (s == "none") return PolicyKind::None;
    if (s == "direct_fee") return PolicyKind::DirectFee;
    if (s == "indirect_fee") return PolicyKind::IndirectFee;
    if (s == "hashcash") return PolicyKind::Hashcash;
    if (s == "coinage") return PolicyKind::Coinage;
    if (s == "burn") return PolicyKind::BurnIdentity;
    if (s == "utxo") return PolicyKind::UtxoIdentity;
    return std::nullopt;
}

} // namespace floodgate
