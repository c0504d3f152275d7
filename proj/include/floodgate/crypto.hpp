// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <array>
#include <compare>
#include <cstring>
#include <map>

#include "floodgate/bytes.hpp"
#include "floodgate/sha256.hpp"

namespace floodgate {

using SecretKey = std::array<std::uint8_t, 32>;

/// Simulation-grade signature: hash(secret || message). Fixed 32 bytes.
/// An all-zero signature is the placeholder slot of a partially signed
/// transaction input.
struct Signature {
    std::array<std::uint8_t, 32> v{};

    auto operator<=>(const Signature&) const = default;

    bool is_placeholder() const {
        for (auto b : v)
            if (b != 0) return false;
        return true;
    }
};

/// Key pair whose public half is simply the digest of the secret. The
/// public digest serves as the address everywhere.
struct KeyPair {
    SecretKey secret{};
    Digest pub{};

    friend bool operator==(const KeyPair&, const KeyPair&) = default;
};

inline SecretKey secret_from_string(std::string_view tag) {
    return hash(tag).v;
}

inline Signature sign(const SecretKey& secret, ByteView msg) {
    Bytes buf;
    buf.reserve(secret.size() + msg.size());
    append_bytes(buf, secret);
    append_bytes(buf, msg);
    return Signature{hash(buf).v};
}

inline Signature sign(const SecretKey& secret, const Digest& msg) {
    return sign(secret, ByteView(msg.v));
}

/// Per-world registry of created keys. Verification recomputes the
/// signature from the registered secret, so it only succeeds for keys
/// minted inside the same simulated world. Append-only; worlds are never
/// shared, so no locking.
class KeyRegistry {
public:
    /// Derives the pair for `seed` and registers it. Deterministic and
    /// idempotent: public = hash(seed).
    KeyPair keygen(const SecretKey& seed) {
        KeyPair kp{seed, hash(seed)};
        secrets_.emplace(kp.pub, kp.secret);
        return kp;
    }

    KeyPair keygen(std::string_view tag) { return keygen(secret_from_string(tag)); }

    bool known(const Digest& pub) const { return secrets_.count(pub) > 0; }

    bool verify(const Digest& pub, ByteView msg, const Signature& sig) const {
        auto it = secrets_.find(pub);
        if (it == secrets_.end()) return false;
        return sign(it->second, msg) == sig;
    }

    bool verify(const Digest& pub, const Digest& msg, const Signature& sig) const {
        return verify(pub, ByteView(msg.v), sig);
    }

    /// Scans for a registered key (other than `excluding`) that validates
    /// the signature. Used to tell a stale-but-genuine offer from a forgery.
    bool signed_by_other_key(ByteView msg, const Signature& sig,
                             const Digest& excluding) const {
        for (const auto& [pub, secret] : secrets_) {
            if (pub == excluding) continue;
            if (sign(secret, msg) == sig) return true;
        }
        return false;
    }

    std::size_t size() const { return secrets_.size(); }

private:
    std::map<Digest, SecretKey> secrets_;
};

} // namespace floodgate
