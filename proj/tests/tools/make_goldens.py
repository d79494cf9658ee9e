#!/usr/bin/env python3
"""Regenerates the frozen golden values used by the C++ test suite.

This script is an independent implementation of the canonical byte layout
(struct packing + hashlib + RFC 8032 ed25519 via the `cryptography` package).
It shares no code with the C++ tree. When the layout changes, rerun it and
update the literals in tests/.
"""

import hashlib
import struct

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

TAG_ENTRY = b"\x01"
TAG_TXN = b"\x02"
TAG_BLOCK = b"\x03"
TAG_ENVELOPE = b"\x04"
TAG_ATTEST = b"\x05"


def u8(v):
    return struct.pack(">B", v)


def u32(v):
    return struct.pack(">I", v)


def u64(v):
    return struct.pack(">Q", v)


def cstr(s):
    b = s.encode("utf-8")
    return u32(len(b)) + b


def opt_str(s):
    if s is None:
        return u8(0)
    return u8(1) + cstr(s)


def sha256(b):
    return hashlib.sha256(b).digest()


def keypair(seed):
    priv = Ed25519PrivateKey.from_private_bytes(seed)
    pub = priv.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    return priv, pub, sha256(pub)


def sig_enc(sig64, signer32):
    return sig64 + signer32


def mutation_enc(record_id, field_name, op, new_value):
    return cstr(record_id) + cstr(field_name) + u8(op) + opt_str(new_value)


def main():
    out = {}

    # --- author keypair from a fixed seed ------------------------------
    seed_a = bytes([0x11]) * 32
    priv_a, pub_a, kid_a = keypair(seed_a)
    out["author_seed"] = seed_a.hex()
    out["author_public_key"] = pub_a.hex()
    out["author_key_id"] = kid_a.hex()

    # --- fixture changelog entry ---------------------------------------
    muts = u32(2)
    muts += mutation_enc("r-0001", "blood_type", 0, "A")
    muts += mutation_enc("r-0001", "notes", 1, None)
    entry_sign_bytes = (
        TAG_ENTRY + u64(1) + cstr("TRIAL-001") + u64(1700000000000) + kid_a + muts
    )
    entry_sig = priv_a.sign(entry_sign_bytes)
    entry_full = entry_sign_bytes + sig_enc(entry_sig, kid_a)
    out["entry_signing_bytes"] = entry_sign_bytes.hex()
    out["entry_signature"] = entry_sig.hex()
    out["entry_full_len"] = str(len(entry_full))
    out["entry_hash"] = sha256(entry_full).hex()

    # --- fixture transaction (same author as submitter) -----------------
    txn_sign_bytes = (
        TAG_TXN
        + u64(1)
        + cstr("TRIAL-001")
        + u64(1700000000000)
        + sha256(entry_full)
        + sig_enc(entry_sig, kid_a)
        + kid_a
    )
    txn_sig = priv_a.sign(txn_sign_bytes)
    txn_full = txn_sign_bytes + sig_enc(txn_sig, kid_a)
    out["txn_signature"] = txn_sig.hex()
    out["txn_digest"] = sha256(txn_full).hex()

    # --- genesis block ---------------------------------------------------
    z32 = bytes(32)
    z64 = bytes(64)
    record = u64(0) + u32(0) + u32(0)  # round, attempt, empty participants
    genesis_sign = TAG_BLOCK + u64(0) + z32 + u64(0) + z32 + u32(0) + record
    genesis_full = genesis_sign + sig_enc(z64, z32)
    out["genesis_hash"] = sha256(genesis_full).hex()

    # --- miner selection fixture ----------------------------------------
    miners = {}
    for name, fill in (("A", 0xAA), ("B", 0xBB), ("C", 0xCC)):
        _, pub, kid = keypair(bytes([fill]) * 32)
        miners[name] = kid
        out[f"miner_{name}_key_id"] = kid.hex()
    nonces = {"A": bytes([0x01]) * 32, "B": bytes([0x02]) * 32, "C": bytes([0x03]) * 32}
    ordered = sorted(miners, key=lambda n: miners[n])
    rnd, att = 7, 1
    seed_input = b"".join(nonces[n] for n in ordered) + u64(rnd) + u32(att)
    seed = sha256(seed_input)
    idx = int.from_bytes(seed, "big") % 3
    out["selection_seed"] = seed.hex()
    out["selection_index"] = str(idx)
    out["selection_winner_key_id"] = miners[ordered[idx]].hex()

    # --- commitment for miner A's nonce ---------------------------------
    out["commitment_A"] = sha256(nonces["A"] + u64(rnd) + u32(att)).hex()

    for k, v in out.items():
        print(f"{k} = {v}")


if __name__ == "__main__":
    main()
