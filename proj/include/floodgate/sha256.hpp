// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <array>
#include <atomic>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <string>

#include "floodgate/bytes.hpp"

namespace floodgate {

/// 32-byte SHA-256 digest. Doubles as the address type: a key's public
/// identity is the digest of its secret.
struct Digest {
    std::array<std::uint8_t, 32> v{};

    auto operator<=>(const Digest&) const = default;

    std::string hex() const { return to_hex(v); }

    static std::optional<Digest> from_hex(std::string_view s) {
        auto bytes = floodgate::from_hex(s);
        if (!bytes || bytes->size() != 32) return std::nullopt;
        Digest d;
        std::memcpy(d.v.data(), bytes->data(), 32);
        return d;
    }

    bool is_zero() const {
        for (auto b : v)
            if (b != 0) return false;
        return true;
    }
};

namespace detail {

inline constexpr std::array<std::uint32_t, 64> kSha256K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
}

} // namespace detail

/// Streaming SHA-256 (FIPS 180-4).
class Sha256 {
public:
    Sha256() { reset(); }

    void reset() {
        state_ = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                  0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
        buffered_ = 0;
        total_ = 0;
    }

    Sha256& update(ByteView data) {
        total_ += data.size();
        for (std::uint8_t b : data) {
            buf_[buffered_++] = b;
            if (buffered_ == 64) {
                compress();
                buffered_ = 0;
            }
        }
        return *this;
    }

    Digest finalize() {
        std::uint64_t bit_len = total_ * 8;
        const std::uint8_t pad = 0x80;
        update(ByteView(&pad, 1));
        const std::uint8_t zero = 0x00;
        while (buffered_ != 56) update(ByteView(&zero, 1));
        std::array<std::uint8_t, 8> len{};
        for (int i = 0; i < 8; ++i)
            len[i] = static_cast<std::uint8_t>(bit_len >> (56 - 8 * i));
        update(len);
        Digest out;
        for (int i = 0; i < 8; ++i) {
            out.v[4 * i + 0] = static_cast<std::uint8_t>(state_[i] >> 24);
            out.v[4 * i + 1] = static_cast<std::uint8_t>(state_[i] >> 16);
            out.v[4 * i + 2] = static_cast<std::uint8_t>(state_[i] >> 8);
            out.v[4 * i + 3] = static_cast<std::uint8_t>(state_[i]);
        }
        return out;
    }

private:
    void compress() {
        using detail::rotr;
        std::array<std::uint32_t, 64> w{};
        for (int i = 0; i < 16; ++i) {
            w[i] = (static_cast<std::uint32_t>(buf_[4 * i]) << 24) |
                   (static_cast<std::uint32_t>(buf_[4 * i + 1]) << 16) |
                   (static_cast<std::uint32_t>(buf_[4 * i + 2]) << 8) |
                   static_cast<std::uint32_t>(buf_[4 * i + 3]);
        }
        for (int i = 16; i < 64; ++i) {
            std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, h] = state_;
        for (int i = 0; i < 64; ++i) {
            std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            std::uint32_t ch = (e & f) ^ (~e & g);
            std::uint32_t t1 = h + s1 + ch + detail::kSha256K[i] + w[i];
            std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            std::uint32_t t2 = s0 + maj;
            h = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        state_[0] += a;
        state_[1] += b;
        state_[2] += c;
        state_[3] += d;
        state_[4] += e;
        state_[5] += f;
        state_[6] += g;
        state_[7] += h;
    }

    std::array<std::uint32_t, 8> state_{};
    std::array<std::uint8_t, 64> buf_{};
    std::size_t buffered_{0};
    std::uint64_t total_{0};
};

// Counts full digest evaluations. Tests use it to pin down verification
// cost (a proof-of-work check must cost exactly one hash regardless of
// difficulty) and to measure solver effort.
inline std::atomic<std::uint64_t>& hash_call_counter() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}

inline std::uint64_t hash_call_count() {
    return hash_call_counter().load(std::memory_order_relaxed);
}

inline Digest hash(ByteView data) {
    hash_call_counter().fetch_add(1, std::memory_order_relaxed);
    return Sha256().update(data).finalize();
}

inline Digest hash(const Bytes& data) { return hash(ByteView(data)); }

inline Digest hash(std::string_view data) {
    return hash(ByteView(reinterpret_cast<const std::uint8_t*>(data.data()),
                         data.size()));
}

} // namespace floodgate

template <>
struct std::hash<floodgate::Digest> {
    std::size_t operator()(const floodgate::Digest& d) const noexcept {
        std::size_t out;
        std::memcpy(&out, d.v.data(), sizeof(out));
        return out;
    }
};
