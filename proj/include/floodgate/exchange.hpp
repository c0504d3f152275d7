// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "floodgate/crypto.hpp"
#include "floodgate/expected.hpp"
#include "floodgate/ledger.hpp"

namespace floodgate {

/// Signed announcement that a name is for sale at a fixed price. Valid only
/// while signed by the key that currently owns the name's live output.
struct SellOffer {
    std::string name;
    Amount price{0};
    Digest payout_address;
    TimePoint expiry{0};
    Signature offer_sig;

    /// Canonical serialization (signed bytes): 1-byte name length, name,
    /// u64 price, payout digest, u64 expiry.
    Bytes canonical() const {
        Bytes out;
        append_u8(out, static_cast<std::uint8_t>(name.size()));
        append_bytes(out, ByteView(reinterpret_cast<const std::uint8_t*>(name.data()),
                                   name.size()));
        append_u64(out, price);
        append_bytes(out, payout_address.v);
        append_u64(out, static_cast<std::uint64_t>(expiry));
        return out;
    }

    Digest digest() const { return hash(canonical()); }

    /// Wire form: canonical bytes plus the signature.
    Bytes encode() const {
        Bytes out = canonical();
        append_bytes(out, offer_sig.v);
        return out;
    }

    static std::optional<SellOffer> decode(ByteView data) {
        ByteReader r(data);
        SellOffer o;
        std::uint8_t len = r.u8();
        Bytes name = r.take(len);
        o.name.assign(name.begin(), name.end());
        o.price = r.u64();
        o.payout_address.v = r.take_array<32>();
        o.expiry = static_cast<TimePoint>(r.u64());
        o.offer_sig.v = r.take_array<32>();
        if (!r.ok() || r.remaining() != 0 || o.name.empty()) return std::nullopt;
        return o;
    }

    friend bool operator==(const SellOffer&, const SellOffer&) = default;
};

enum class OfferError {
    NameUnknown,
    NotOwner,
    BadSignature,
    Expired,
    OwnerChanged,
};

inline std::string_view to_string(OfferError e) {
    switch (e) {
    case OfferError::NameUnknown: return "name-unknown";
    case OfferError::NotOwner: return "not-owner";
    case OfferError::BadSignature: return "bad-signature";
    case OfferError::Expired: return "expired";
    case OfferError::OwnerChanged: return "owner-changed";
    }
    return "unknown";
}

inline constexpr Duration kDefaultOfferLifetime = 24 * 3600;

/// Creates and signs a sell offer for a name the caller owns.
inline Expected<SellOffer, OfferError> make_offer(const Ledger& view, std::string name,
                                                  Amount price, const Digest& payout,
                                                  TimePoint expiry,
                                                  const SecretKey& owner_secret) {
    auto live = view.resolve_name(name);
    if (!live) return OfferError::NameUnknown;
    if (hash(owner_secret) != live->second.owner) return OfferError::NotOwner;
    SellOffer offer{std::move(name), price, payout, expiry, Signature{}};
    offer.offer_sig = sign(owner_secret, offer.canonical());
    return offer;
}

struct OfferStatus {
    bool valid{false};
    OfferError reason{OfferError::NameUnknown};

    static OfferStatus ok() { return {true, OfferError::NameUnknown}; }
    static OfferStatus bad(OfferError e) { return {false, e}; }
};

/// An offer is live iff the name exists, it has not expired, and the
/// signature is by the name's current owner. A signature by a previous
/// owner reports OwnerChanged rather than BadSignature.
inline OfferStatus verify_offer(const Ledger& view, const SellOffer& offer, TimePoint now) {
    auto live = view.resolve_name(offer.name);
    if (!live) return OfferStatus::bad(OfferError::NameUnknown);
    if (now >= offer.expiry) return OfferStatus::bad(OfferError::Expired);
    Bytes canonical = offer.canonical();
    if (view.keys().verify(live->second.owner, canonical, offer.offer_sig))
        return OfferStatus::ok();
    const auto* history = view.name_owner_history(offer.name);
    if (history)
        for (const auto& past : *history)
            if (past != live->second.owner &&
                view.keys().verify(past, canonical, offer.offer_sig))
                return OfferStatus::bad(OfferError::OwnerChanged);
    return OfferStatus::bad(OfferError::BadSignature);
}

/// Buyer-built trade transaction: coin inputs signed, name input left as a
/// placeholder for the seller. Output order is payment, name, then change.
struct PartialTradeTx {
    Transaction tx;
    Digest offer_digest;
    std::size_t name_input_index{0};
    Digest buyer;

    Bytes encode() const {
        Bytes out = encode_tx_wire(tx);
        append_bytes(out, offer_digest.v);
        return out;
    }

    static std::optional<PartialTradeTx> decode(ByteView data) {
        if (data.size() < 32) return std::nullopt;
        auto tx = decode_tx_wire(data.first(data.size() - 32));
        if (!tx) return std::nullopt;
        PartialTradeTx p;
        p.tx = std::move(*tx);
        std::copy(data.end() - 32, data.end(), p.offer_digest.v.begin());
        // recover the placeholder slot and the buyer from structure
        bool found = false;
        for (std::size_t i = 0; i < p.tx.inputs.size(); ++i)
            if (p.tx.inputs[i].sig.is_placeholder()) {
                p.name_input_index = i;
                found = true;
            }
        for (const auto& o : p.tx.outputs)
            if (o.is_name()) p.buyer = o.owner;
        if (!found) return std::nullopt;
        return p;
    }
};

enum class TradeError {
    OfferInvalid,
    InsufficientFunds,
    PriceMismatch,
    WrongPayout,
    BadBuyerSignature,
    NotOwner,
};

inline std::string_view to_string(TradeError e) {
    switch (e) {
    case TradeError::OfferInvalid: return "offer-invalid";
    case TradeError::InsufficientFunds: return "insufficient-funds";
    case TradeError::PriceMismatch: return "price-mismatch";
    case TradeError::WrongPayout: return "wrong-payout";
    case TradeError::BadBuyerSignature: return "bad-buyer-signature";
    case TradeError::NotOwner: return "not-owner";
    }
    return "unknown";
}

/// Builds the buyer's half of an atomic name trade: spends the given coin
/// outpoints plus the name output; pays the asking price to the offer's
/// payout address, reassigns the name to the buyer (value data unchanged),
/// and returns change to the buyer. Coin inputs are signed; the name input
/// carries a placeholder signature for the seller to fill.
inline Expected<PartialTradeTx, TradeError>
build_take(const Ledger& view, const SellOffer& offer, const SecretKey& buyer_secret,
           const std::vector<Outpoint>& buyer_utxos, Amount fee, TimePoint now) {
    if (!verify_offer(view, offer, now).valid) return TradeError::OfferInvalid;
    auto live = view.resolve_name(offer.name);

    Amount funds = 0;
    for (const auto& op : buyer_utxos) {
        auto it = view.utxos().find(op);
        if (it == view.utxos().end()) return TradeError::InsufficientFunds;
        funds += it->second.output.value;
    }
    const Output& name_out = live->second;
    Amount have = funds + name_out.value;
    Amount need = offer.price + fee + name_out.value;
    if (have < need) return TradeError::InsufficientFunds;

    Digest buyer = hash(buyer_secret);
    Transaction tx;
    for (const auto& op : buyer_utxos) tx.inputs.push_back(TxInput{op, Signature{}});
    std::size_t name_input_index = tx.inputs.size();
    tx.inputs.push_back(TxInput{live->first, Signature{}});

    tx.outputs.push_back(Output{offer.price, offer.payout_address, CoinKind{}});
    tx.outputs.push_back(Output{name_out.value, buyer, name_out.kind});
    Amount change = have - need;
    if (change > 0) tx.outputs.push_back(Output{change, buyer, CoinKind{}});
    tx.declared_size = static_cast<std::uint32_t>(tx.canonical_bytes().size() +
                                                  32 * tx.inputs.size());

    Digest digest = tx.signing_digest();
    for (std::size_t i = 0; i < buyer_utxos.size(); ++i)
        tx.inputs[i].sig = sign(buyer_secret, digest);

    return PartialTradeTx{std::move(tx), offer.digest(), name_input_index, buyer};
}

/// The seller's verification of a received partial trade: the payment
/// output must pay at least the asking price to the offer's payout address,
/// the name must go to the partial's declared buyer with the data intact,
/// and every buyer signature must verify. On success the seller signs the
/// name input, completing the transaction.
inline Expected<Transaction, TradeError>
seller_verify_and_sign(const Ledger& view, const PartialTradeTx& partial,
                       const SellOffer& offer, const SecretKey& seller_secret) {
    auto live = view.resolve_name(offer.name);
    if (!live) return TradeError::OfferInvalid;
    if (hash(seller_secret) != live->second.owner) return TradeError::NotOwner;

    const Transaction& tx = partial.tx;
    if (partial.name_input_index >= tx.inputs.size()) return TradeError::OfferInvalid;
    if (tx.inputs[partial.name_input_index].prevout != live->first)
        return TradeError::OfferInvalid;

    Amount paid = 0;
    for (const auto& o : tx.outputs)
        if (!o.is_name() && !o.is_burn() && o.owner == offer.payout_address) paid += o.value;
    if (paid < offer.price) {
        // a price-sized output to another address means the payment was
        // diverted; otherwise it is simply too small
        for (const auto& o : tx.outputs)
            if (!o.is_name() && !o.is_burn() && o.owner != offer.payout_address &&
                o.value >= offer.price)
                return TradeError::WrongPayout;
        return TradeError::PriceMismatch;
    }

    const Output* name_out = nullptr;
    for (const auto& o : tx.outputs)
        if (const auto* n = o.name())
            if (n->name == offer.name) name_out = &o;
    if (!name_out || name_out->owner != partial.buyer)
        return TradeError::OfferInvalid;
    const auto* live_name = live->second.name();
    if (name_out->name()->value != live_name->value)
        return TradeError::OfferInvalid; // data must carry through unchanged

    Digest digest = tx.signing_digest();
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        if (i == partial.name_input_index) continue;
        auto it = view.utxos().find(tx.inputs[i].prevout);
        if (it == view.utxos().end()) return TradeError::BadBuyerSignature;
        if (!view.keys().verify(it->second.output.owner, digest, tx.inputs[i].sig))
            return TradeError::BadBuyerSignature;
    }

    Transaction full = tx;
    full.inputs[partial.name_input_index].sig = sign(seller_secret, digest);
    return full;
}

enum class SettleOutcome {
    Confirmed,          // all trade effects applied atomically
    RejectedByMempool,  // never entered the mempool
    NotConfirmed,       // entered the mempool but lost to a conflict
};

struct SettleResult {
    SettleOutcome outcome{SettleOutcome::RejectedByMempool};
    std::optional<TxError> reason;
};

/// Submits a fully signed trade and mines the next block. Either every
/// effect of the transaction lands (payment, name move, change) or none do.
inline SettleResult settle(Ledger& ledger, const Transaction& full_tx, TimePoint now) {
    auto submitted = ledger.submit_tx(full_tx);
    if (!submitted.accepted) return {SettleOutcome::RejectedByMempool, submitted.reason};
    TimePoint at = std::max(now, ledger.next_block_time());
    const Block& block = ledger.mine_block(at);
    Digest id = full_tx.txid();
    for (const auto& tx : block.txs)
        if (tx.txid() == id) return {SettleOutcome::Confirmed, std::nullopt};
    return {SettleOutcome::NotConfirmed, std::nullopt};
}

} // namespace floodgate
