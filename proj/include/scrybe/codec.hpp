// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "scrybe/bytes.hpp"

namespace scrybe {

// Canonical binary layout shared by every hashed or signed structure:
// fixed field order, big-endian fixed-width integers, u32 length prefixes
// for strings and lists, one presence byte for optionals. Encodings used
// as hash or signature inputs start with a one-byte domain tag so bytes
// signed in one context never verify in another.
enum : uint8_t {
    kTagEntry = 0x01,
    kTagTransaction = 0x02,
    kTagBlock = 0x03,
    kTagEnvelope = 0x04,
    kTagAttestation = 0x05,
};

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_valid_utf8(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        uint8_t c = static_cast<uint8_t>(s[i]);
        size_t len;
        uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            len = 2;
            cp = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            len = 3;
            cp = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (size_t k = 1; k < len; ++k) {
            uint8_t cc = static_cast<uint8_t>(s[i + k]);
            if ((cc & 0xc0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3f);
        }
        // reject overlong forms, surrogates, and values past U+10FFFF
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp >= 0xd800 && cp <= 0xdfff) return false;
        if (cp > 0x10ffff) return false;
        i += len;
    }
    return true;
}

class ByteWriter {
  public:
    void u8(uint8_t v) { out_.push_back(v); }

    void u32(uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8)
            out_.push_back(static_cast<uint8_t>(v >> shift));
    }

    void u64(uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8)
            out_.push_back(static_cast<uint8_t>(v >> shift));
    }

    void raw(std::span<const uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }

    void digest(const Digest& d) { raw(d.bytes); }

    void str(std::string_view s) {
        if (!is_valid_utf8(s)) throw CodecError("string is not valid UTF-8");
        if (s.size() > UINT32_MAX) throw CodecError("string too long");
        u32(static_cast<uint32_t>(s.size()));
        raw({reinterpret_cast<const uint8_t*>(s.data()), s.size()});
    }

    void opt_str(const std::optional<std::string>& s) {
        if (s) {
            u8(1);
            str(*s);
        } else {
            u8(0);
        }
    }

    void count(size_t n) {
        if (n > UINT32_MAX) throw CodecError("list too long");
        u32(static_cast<uint32_t>(n));
    }

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

  private:
    Bytes out_;
};

class ByteReader {
  public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v = (v << 8) | data_[pos_++];
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v = (v << 8) | data_[pos_++];
        return v;
    }

    Digest digest() {
        need(32);
        Digest d;
        std::memcpy(d.bytes.data(), data_.data() + pos_, 32);
        pos_ += 32;
        return d;
    }

    std::span<const uint8_t> raw(size_t n) {
        need(n);
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::string str() {
        uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        if (!is_valid_utf8(s)) throw CodecError("decoded string is not valid UTF-8");
        return s;
    }

    std::optional<std::string> opt_str() {
        uint8_t flag = u8();
        if (flag == 0) return std::nullopt;
        if (flag != 1) throw CodecError("bad optional presence byte");
        return str();
    }

    uint32_t count() { return u32(); }

    bool done() const { return pos_ == data_.size(); }
    size_t remaining() const { return data_.size() - pos_; }

    void expect_done() const {
        if (!done()) throw CodecError("trailing bytes after value");
    }

  private:
    void need(size_t n) const {
        if (pos_ + n > data_.size()) throw CodecError("input truncated");
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

}  // namespace scrybe
