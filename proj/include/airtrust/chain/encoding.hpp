#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "airtrust/chain/hash.hpp"

namespace airtrust::chain {

// Canonical binary form: big-endian fixed-width integers; byte strings carry
// a u32 length prefix; fields appear in declaration order.
class Encoder {
public:
    void put_u8(uint8_t v) { out_.push_back(v); }

    void put_u32(uint32_t v) {
        for (int i = 3; i >= 0; --i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void put_u64(uint64_t v) {
        for (int i = 7; i >= 0; --i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void put_bytes(std::span<const uint8_t> b) {
        put_u32(static_cast<uint32_t>(b.size()));
        out_.insert(out_.end(), b.begin(), b.end());
    }

    void put_bytes(const Bytes& b) { put_bytes(std::span<const uint8_t>(b.data(), b.size())); }

    void put_string(const std::string& s) {
        put_bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
    }

    template <size_t N>
    void put_fixed(const std::array<uint8_t, N>& a) {
        out_.insert(out_.end(), a.begin(), a.end());
    }

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

struct DecodeError : std::runtime_error {
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

class Decoder {
public:
    explicit Decoder(std::span<const uint8_t> data) : data_(data) {}

    uint8_t get_u8() { return take(1)[0]; }

    uint32_t get_u32() {
        auto b = take(4);
        return (uint32_t{b[0]} << 24) | (uint32_t{b[1]} << 16) | (uint32_t{b[2]} << 8) | b[3];
    }

    uint64_t get_u64() {
        uint64_t v = 0;
        auto b = take(8);
        for (int i = 0; i < 8; ++i) v = (v << 8) | b[i];
        return v;
    }

    Bytes get_bytes() {
        uint32_t len = get_u32();
        auto b = take(len);
        return Bytes(b.begin(), b.end());
    }

    std::string get_string() {
        auto b = get_bytes();
        return std::string(b.begin(), b.end());
    }

    template <size_t N>
    std::array<uint8_t, N> get_fixed() {
        auto b = take(N);
        std::array<uint8_t, N> a{};
        std::copy(b.begin(), b.end(), a.begin());
        return a;
    }

    bool done() const { return pos_ == data_.size(); }

private:
    std::span<const uint8_t> take(size_t n) {
        if (pos_ + n > data_.size()) throw DecodeError("truncated input");
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

}  // namespace airtrust::chain
