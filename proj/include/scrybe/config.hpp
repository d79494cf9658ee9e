// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scrybe/bytes.hpp"

namespace scrybe {

/// `key = value` config file. Lines starting with '#' and blank lines are
/// ignored; values keep internal whitespace.
class Config {
  public:
    static Config parse(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::runtime_error("missing config key: " + key);
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    uint64_t get_u64(const std::string& key) const {
        const std::string v = get(key);
        try {
            size_t pos = 0;
            uint64_t out = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw std::runtime_error("config key " + key + " is not an unsigned integer: " + v);
        }
    }

    uint64_t get_u64_or(const std::string& key, uint64_t fallback) const {
        return has(key) ? get_u64(key) : fallback;
    }

    bool get_bool_or(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string v = get(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw std::runtime_error("config key " + key + " is not a boolean: " + v);
    }

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    static std::string trim(const std::string& s) {
        size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

struct HostPort {
    std::string host;
    uint16_t port = 0;
};

inline HostPort parse_host_port(const std::string& addr) {
    size_t colon = addr.rfind(':');
    if (colon == std::string::npos || colon + 1 >= addr.size())
        throw std::runtime_error("expected host:port, got " + addr);
    HostPort hp;
    hp.host = addr.substr(0, colon);
    unsigned long p = std::stoul(addr.substr(colon + 1));
    if (p == 0 || p > 65535) throw std::runtime_error("port out of range in " + addr);
    hp.port = static_cast<uint16_t>(p);
    return hp;
}

/// Peer list: one record per line, miner key id in hex, a space, host:port.
struct PeerEntry {
    Digest key_id;
    HostPort address;
};

inline std::vector<PeerEntry> parse_peers(const std::string& text) {
    std::vector<PeerEntry> peers;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kid_hex, addr;
        if (!(ls >> kid_hex >> addr))
            throw std::runtime_error("peers line " + std::to_string(lineno) +
                                     ": expected '<key_id hex> <host:port>'");
        PeerEntry p;
        p.key_id = digest_from_hex(kid_hex);
        p.address = parse_host_port(addr);
        peers.push_back(std::move(p));
    }
    return peers;
}

inline std::vector<PeerEntry> load_peers(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open peers file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_peers(buf.str());
}

}  // namespace scrybe
