// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "scrybe/crypto.hpp"

namespace scrybe {

// Append-only record file shared by the changelog store and the chain
// store. Layout: an 8-byte magic, then records of
//   u32 big-endian payload length | payload | sha256(payload)
// A record is durable once append() returns (write + fsync). On open, the
// file is scanned from the front; the first record that is short or fails
// its checksum marks a torn tail from an interrupted write, and the file is
// truncated there. The checksum exists for crash detection only — tamper
// evidence is the chain's job.
class AppendLog {
  public:
    static constexpr size_t kMaxRecord = 16 * 1024 * 1024;

    struct OpenStats {
        size_t records = 0;
        bool truncated_torn_tail = false;
    };

    AppendLog(const std::string& path, const std::string& magic) : path_(path), magic_(magic) {
        if (magic_.size() != 8) throw std::invalid_argument("append log magic must be 8 bytes");
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
    }

    ~AppendLog() {
        if (fd_ >= 0) ::close(fd_);
    }

    AppendLog(const AppendLog&) = delete;
    AppendLog& operator=(const AppendLog&) = delete;

    /// Scan the file, recover from a torn tail, and hand back every intact
    /// payload in order.
    OpenStats read_all(std::vector<Bytes>& out) {
        OpenStats stats;
        Bytes data = read_whole_file();
        if (data.size() < 8) {
            if (!data.empty()) stats.truncated_torn_tail = true;
            truncate_to(0);
            write_magic();
            size_ = 8;
            return stats;
        }
        if (std::memcmp(data.data(), magic_.data(), 8) != 0)
            throw std::runtime_error(path_ + " is not an append log of the expected kind");
        size_t pos = 8;
        while (pos < data.size()) {
            size_t record_start = pos;
            if (data.size() - pos < 4) break;
            uint32_t len = (uint32_t(data[pos]) << 24) | (uint32_t(data[pos + 1]) << 16) |
                           (uint32_t(data[pos + 2]) << 8) | uint32_t(data[pos + 3]);
            pos += 4;
            if (len > kMaxRecord || data.size() - pos < len + 32) {
                pos = record_start;
                break;
            }
            std::span<const uint8_t> payload(data.data() + pos, len);
            pos += len;
            Digest stored;
            std::memcpy(stored.bytes.data(), data.data() + pos, 32);
            pos += 32;
            if (hash_bytes(payload) != stored) {
                pos = record_start;
                break;
            }
            out.emplace_back(payload.begin(), payload.end());
            ++stats.records;
        }
        if (pos < data.size()) {
            stats.truncated_torn_tail = true;
            truncate_to(pos);
        }
        size_ = pos;
        return stats;
    }

    /// Durable append: the record is fully on disk when this returns.
    void append(std::span<const uint8_t> payload) {
        if (payload.size() > kMaxRecord) throw std::runtime_error("record exceeds append log limit");
        Bytes rec;
        rec.reserve(4 + payload.size() + 32);
        uint32_t len = static_cast<uint32_t>(payload.size());
        rec.push_back(static_cast<uint8_t>(len >> 24));
        rec.push_back(static_cast<uint8_t>(len >> 16));
        rec.push_back(static_cast<uint8_t>(len >> 8));
        rec.push_back(static_cast<uint8_t>(len));
        rec.insert(rec.end(), payload.begin(), payload.end());
        Digest h = hash_bytes(payload);
        rec.insert(rec.end(), h.bytes.begin(), h.bytes.end());
        write_fully(rec);
        if (::fsync(fd_) != 0) throw std::runtime_error("fsync failed on " + path_);
        size_ += rec.size();
    }

    const std::string& path() const { return path_; }

  private:
    Bytes read_whole_file() {
        off_t end = ::lseek(fd_, 0, SEEK_END);
        if (end < 0) throw std::runtime_error("lseek failed on " + path_);
        Bytes data(static_cast<size_t>(end));
        size_t got = 0;
        while (got < data.size()) {
            ssize_t n = ::pread(fd_, data.data() + got, data.size() - got, static_cast<off_t>(got));
            if (n < 0) throw std::runtime_error("read failed on " + path_);
            if (n == 0) break;
            got += static_cast<size_t>(n);
        }
        data.resize(got);
        return data;
    }

    void write_magic() {
        if (::lseek(fd_, 0, SEEK_SET) < 0) throw std::runtime_error("lseek failed on " + path_);
        write_fully({reinterpret_cast<const uint8_t*>(magic_.data()), 8});
        if (::fsync(fd_) != 0) throw std::runtime_error("fsync failed on " + path_);
    }

    void truncate_to(size_t size) {
        if (::ftruncate(fd_, static_cast<off_t>(size)) != 0)
            throw std::runtime_error("truncate failed on " + path_);
        if (::lseek(fd_, static_cast<off_t>(size), SEEK_SET) < 0)
            throw std::runtime_error("lseek failed on " + path_);
    }

    void write_fully(std::span<const uint8_t> data) {
        size_t written = 0;
        while (written < data.size()) {
            ssize_t n = ::write(fd_, data.data() + written, data.size() - written);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw std::runtime_error("write failed on " + path_);
            }
            written += static_cast<size_t>(n);
        }
    }

    std::string path_;
    std::string magic_;
    int fd_ = -1;
    size_t size_ = 0;
};

}  // namespace scrybe
