// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "scrybe/append_log.hpp"
#include "scrybe/model.hpp"

namespace scrybe {

/// Local copy of the chain. append() must be durable before it returns so a
/// block is never acknowledged and then lost.
class ChainStore {
  public:
    virtual ~ChainStore() = default;

    virtual void append(const Block& b) = 0;

    /// Drop blocks [height..tip]. Used only by catch-up when a strictly
    /// longer valid chain replaces a local tail no peer ever acknowledged.
    virtual void replace_from(uint64_t height) = 0;

    uint64_t tip_height() const { return blocks_.back().height; }
    const Block& tip() const { return blocks_.back(); }
    const Block& at(uint64_t height) const { return blocks_.at(height); }
    const std::vector<Block>& blocks() const { return blocks_; }

    std::vector<Block> range(uint64_t from, size_t max_count) const {
        std::vector<Block> out;
        for (uint64_t h = from; h < blocks_.size() && out.size() < max_count; ++h)
            out.push_back(blocks_[h]);
        return out;
    }

  protected:
    void check_extends(const Block& b) const {
        if (b.height != blocks_.size())
            throw std::logic_error("chain store append out of order at height " +
                                   std::to_string(b.height));
    }

    void check_replace(uint64_t height) const {
        if (height == 0 || height > blocks_.size())
            throw std::logic_error("bad replace_from height " + std::to_string(height));
    }

    std::vector<Block> blocks_;
};

class MemoryChainStore : public ChainStore {
  public:
    MemoryChainStore() { blocks_.push_back(genesis_block()); }

    void append(const Block& b) override {
        check_extends(b);
        blocks_.push_back(b);
    }

    void replace_from(uint64_t height) override {
        check_replace(height);
        blocks_.resize(height);
    }
};

/// Same recovery rule as the changelog: scan on open, truncate a torn tail.
/// Genesis is materialized, never stored.
class FileChainStore : public ChainStore {
  public:
    explicit FileChainStore(const std::string& data_dir) : path_(data_dir + "/chain.log") {
        log_ = std::make_unique<AppendLog>(path_, kMagic);
        blocks_.push_back(genesis_block());
        std::vector<Bytes> payloads;
        recovery_ = log_->read_all(payloads);
        for (const auto& p : payloads) {
            Block b = decode_block(p);
            if (b.height != blocks_.size())
                throw std::runtime_error("chain file has non-consecutive heights");
            blocks_.push_back(std::move(b));
        }
    }

    void append(const Block& b) override {
        check_extends(b);
        log_->append(canonical_encode(b));
        blocks_.push_back(b);
    }

    void replace_from(uint64_t height) override {
        check_replace(height);
        blocks_.resize(height);
        // rewrite the whole file, then swap it in
        std::string tmp = path_ + ".tmp";
        std::remove(tmp.c_str());
        {
            AppendLog fresh(tmp, kMagic);
            std::vector<Bytes> none;
            fresh.read_all(none);
            for (size_t h = 1; h < blocks_.size(); ++h) fresh.append(canonical_encode(blocks_[h]));
        }
        log_.reset();
        if (std::rename(tmp.c_str(), path_.c_str()) != 0)
            throw std::runtime_error("cannot swap rewritten chain file into place");
        log_ = std::make_unique<AppendLog>(path_, kMagic);
        std::vector<Bytes> reread;
        log_->read_all(reread);
        if (reread.size() + 1 != blocks_.size())
            throw std::runtime_error("rewritten chain file does not match in-memory chain");
    }

    bool recovered_torn_tail() const { return recovery_.truncated_torn_tail; }

  private:
    static constexpr const char* kMagic = "SCRYCHN\x01";

    std::string path_;
    std::unique_ptr<AppendLog> log_;
    AppendLog::OpenStats recovery_;
};

}  // namespace scrybe
