// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace floodgate {

/// Minimal value-or-error carrier for operations with enumerated failure
/// reasons. Stand-in until std::expected is available on the toolchain.
template <typename T, typename E>
class Expected {
public:
    Expected(T value) : v_(std::in_place_index<0>, std::move(value)) {} // NOLINT
    Expected(E error) : v_(std::in_place_index<1>, error) {}            // NOLINT

    bool ok() const { return v_.index() == 0; }
    explicit operator bool() const { return ok(); }

    T& value() {
        if (!ok()) throw std::logic_error("Expected: value() on error");
        return std::get<0>(v_);
    }
    const T& value() const {
        if (!ok()) throw std::logic_error("Expected: value() on error");
        return std::get<0>(v_);
    }
    T& operator*() { return value(); }
    const T& operator*() const { return value(); }
    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }

    E error() const {
        if (ok()) throw std::logic_error("Expected: error() on value");
        return std::get<1>(v_);
    }

private:
    std::variant<T, E> v_;
};

} // namespace floodgate
