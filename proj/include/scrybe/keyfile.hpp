// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <sys/stat.h>

#include <string>

#include "scrybe/json_io.hpp"

namespace scrybe {

// Keypair files are the only place a private key is ever written. They are
// created with owner-only permissions; everything else (registries, wire
// messages, reports) carries public material only.

inline void save_keypair(const KeyPair& kp, const std::string& path) {
    json j{{"key_id", to_hex(kp.key_id)},
           {"public_key", to_hex(std::span<const uint8_t>(kp.public_key.bytes))},
           {"private_key", to_hex(std::span<const uint8_t>(kp.private_key))}};
    write_file(path, j.dump(2) + "\n");
    if (::chmod(path.c_str(), S_IRUSR | S_IWUSR) != 0)
        throw std::runtime_error("cannot restrict permissions on " + path);
}

inline KeyPair load_keypair(const std::string& path) {
    json j = load_json_file(path);
    KeyPair kp;
    kp.public_key = public_key_from_hex(j.at("public_key").get<std::string>());
    Bytes priv = from_hex(j.at("private_key").get<std::string>());
    if (priv.size() != kp.private_key.size())
        throw std::runtime_error("private key in " + path + " has wrong length");
    std::copy(priv.begin(), priv.end(), kp.private_key.begin());
    kp.key_id = key_id_of(kp.public_key);
    if (j.contains("key_id") && digest_from_hex(j.at("key_id").get<std::string>()) != kp.key_id)
        throw std::runtime_error("key_id in " + path + " does not match public key");
    return kp;
}

}  // namespace scrybe
