// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "floodgate/bytes.hpp"
#include "floodgate/ledger.hpp"
#include "floodgate/rational.hpp"
#include "floodgate/sha256.hpp"

namespace floodgate {

// --- proofs attached to P2P messages ---------------------------------------

struct NoProof {
    friend bool operator==(const NoProof&, const NoProof&) = default;
};

/// Per-message proof-of-work: hash(payload || d || n) <= 2^256 / d.
struct HashcashProof {
    std::uint64_t difficulty{1};
    std::uint64_t nonce{0};
    friend bool operator==(const HashcashProof&, const HashcashProof&) = default;
};

/// Confirmed fee transaction committing to the message digest.
struct FeeTxProof {
    Digest txid;
    friend bool operator==(const FeeTxProof&, const FeeTxProof&) = default;
};

/// Confirmed coinage-destroying transaction committing to the message digest.
struct CoinageTxProof {
    Digest txid;
    friend bool operator==(const CoinageTxProof&, const CoinageTxProof&) = default;
};

/// Registered burn identity plus its signature over the message digest.
struct BurnIdentityProof {
    Digest identity;
    Signature sig;
    friend bool operator==(const BurnIdentityProof&, const BurnIdentityProof&) = default;
};

/// Owned UTXO plus its owner's signature over the message digest.
struct UtxoOwnerProof {
    Outpoint outpoint;
    Signature sig;
    friend bool operator==(const UtxoOwnerProof&, const UtxoOwnerProof&) = default;
};

using Proof = std::variant<NoProof, HashcashProof, FeeTxProof, CoinageTxProof,
                           BurnIdentityProof, UtxoOwnerProof>;

/// Wire form: 1-byte variant tag, then the variant fields big-endian.
inline Bytes encode_proof(const Proof& proof) {
    Bytes out;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NoProof>) {
                append_u8(out, 0);
            } else if constexpr (std::is_same_v<T, HashcashProof>) {
                append_u8(out, 1);
                append_u64(out, p.difficulty);
                append_u64(out, p.nonce);
            } else if constexpr (std::is_same_v<T, FeeTxProof>) {
                append_u8(out, 2);
                append_bytes(out, p.txid.v);
            } else if constexpr (std::is_same_v<T, CoinageTxProof>) {
                append_u8(out, 3);
                append_bytes(out, p.txid.v);
            } else if constexpr (std::is_same_v<T, BurnIdentityProof>) {
                append_u8(out, 4);
                append_bytes(out, p.identity.v);
                append_bytes(out, p.sig.v);
            } else {
                append_u8(out, 5);
                append_bytes(out, p.outpoint.txid.v);
                append_u32(out, p.outpoint.index);
                append_bytes(out, p.sig.v);
            }
        },
        proof);
    return out;
}

inline std::optional<Proof> decode_proof(ByteReader& r) {
    switch (r.u8()) {
    case 0: return Proof{NoProof{}};
    case 1: {
        HashcashProof p;
        p.difficulty = r.u64();
        p.nonce = r.u64();
        if (!r.ok()) return std::nullopt;
        return Proof{p};
    }
    case 2: {
        FeeTxProof p;
        p.txid.v = r.take_array<32>();
        if (!r.ok()) return std::nullopt;
        return Proof{p};
    }
    case 3: {
        CoinageTxProof p;
        p.txid.v = r.take_array<32>();
        if (!r.ok()) return std::nullopt;
        return Proof{p};
    }
    case 4: {
        BurnIdentityProof p;
        p.identity.v = r.take_array<32>();
        p.sig.v = r.take_array<32>();
        if (!r.ok()) return std::nullopt;
        return Proof{p};
    }
    case 5: {
        UtxoOwnerProof p;
        p.outpoint.txid.v = r.take_array<32>();
        p.outpoint.index = r.u32();
        p.sig.v = r.take_array<32>();
        if (!r.ok()) return std::nullopt;
        return Proof{p};
    }
    default: return std::nullopt;
    }
}

inline std::size_t proof_wire_size(const Proof& proof) {
    return encode_proof(proof).size();
}

// --- message envelope -------------------------------------------------------

/// First payload byte says what the body is; nodes use it to apply effects
/// (offer book, trade hand-off) after admission.
enum class BodyType : std::uint8_t {
    Blob = 0,  // opaque bytes (spam in scenarios)
    Offer = 1, // sell-offer wire form
    Take = 2,  // partially signed trade wire form
    Tx = 3,    // full transaction wire form
};

inline Bytes make_payload(BodyType type, ByteView body) {
    Bytes out;
    append_u8(out, static_cast<std::uint8_t>(type));
    append_bytes(out, body);
    return out;
}

inline std::optional<BodyType> payload_type(ByteView payload) {
    if (payload.empty() || payload[0] > 3) return std::nullopt;
    return static_cast<BodyType>(payload[0]);
}

inline ByteView payload_body(ByteView payload) {
    return payload.empty() ? payload : payload.subspan(1);
}

/// A gossip message. `declared_size` is the byte size the bandwidth and
/// fee models charge for the payload; proof bytes are accounted separately.
struct P2PMessage {
    Bytes payload;
    std::uint32_t declared_size{1};
    Proof proof;
    Digest digest; // always hash(payload)
};

inline P2PMessage make_message(Bytes payload, std::uint32_t declared_size, Proof proof) {
    P2PMessage msg;
    msg.digest = hash(payload);
    msg.payload = std::move(payload);
    msg.declared_size = declared_size;
    msg.proof = std::move(proof);
    return msg;
}

/// Total bytes a relay charges for the message: declared payload size plus
/// encoded proof size.
inline std::uint64_t message_wire_size(const P2PMessage& msg) {
    return static_cast<std::uint64_t>(msg.declared_size) + proof_wire_size(msg.proof);
}

// --- admission decisions ----------------------------------------------------

enum class RejectReason {
    None,
    WrongProofKind,
    BelowDifficultyFloor,
    InvalidPoW,
    FeeTooLow,
    TxNotFound,
    NoCommitment,
    AlreadyClaimed,
    InsufficientCoinage,
    NoBurnOutput,
    BurnTooSmall,
    UnknownIdentity,
    UtxoNotFound,
    ValueTooSmall,
    BadSignature,
    QuotaExhausted,
    InvalidPayload,
    InvalidTx,
    // netsim drop reasons share the trace vocabulary
    Duplicate,
    OfferInvalid,
};

inline std::string_view to_string(RejectReason r) {
    switch (r) {
    case RejectReason::None: return "-";
    case RejectReason::WrongProofKind: return "wrong-proof-kind";
    case RejectReason::BelowDifficultyFloor: return "below-difficulty-floor";
    case RejectReason::InvalidPoW: return "invalid-pow";
    case RejectReason::FeeTooLow: return "fee-too-low";
    case RejectReason::TxNotFound: return "tx-not-found";
    case RejectReason::NoCommitment: return "no-commitment";
    case RejectReason::AlreadyClaimed: return "already-claimed";
    case RejectReason::InsufficientCoinage: return "insufficient-coinage";
    case RejectReason::NoBurnOutput: return "no-burn-output";
    case RejectReason::BurnTooSmall: return "burn-too-small";
    case RejectReason::UnknownIdentity: return "unknown-identity";
    case RejectReason::UtxoNotFound: return "utxo-not-found";
    case RejectReason::ValueTooSmall: return "value-too-small";
    case RejectReason::BadSignature: return "bad-signature";
    case RejectReason::QuotaExhausted: return "quota-exhausted";
    case RejectReason::InvalidPayload: return "invalid-payload";
    case RejectReason::InvalidTx: return "invalid-tx";
    case RejectReason::Duplicate: return "duplicate";
    case RejectReason::OfferInvalid: return "offer-invalid";
    }
    return "unknown";
}

/// Outcome of an admission check. Admitted messages carry a priority used
/// to order them when relay capacity is scarce (higher first); the priority
/// is each policy's controlling quantity.
struct AdmissionDecision {
    bool admitted{false};
    RejectReason reason{RejectReason::None};
    Rational priority{0};

    static AdmissionDecision admit(Rational priority) {
        return {true, RejectReason::None, priority};
    }
    static AdmissionDecision reject(RejectReason reason) {
        return {false, reason, Rational(0)};
    }
};

} // namespace floodgate
