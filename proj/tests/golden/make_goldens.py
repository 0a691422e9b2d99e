#!/usr/bin/env python3
"""Regenerates the golden fixtures in this directory from first principles.

Everything here is computed independently of the C++ implementation (big-int
arithmetic, hashlib, and the `cryptography` package), so the fixtures act as an
oracle for the snapshot format, the digest construction, the double-hashing bit
derivation, and the Ed25519 record signatures.

Keys under keys/ are TEST-ONLY and must never be used outside the test suite.
"""

import hashlib
import struct
from pathlib import Path

from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

HERE = Path(__file__).resolve().parent

MAGIC = b"PPDPBF01"
VERSION = 1


def digest_plain(content: bytes, user: str) -> bytes:
    pre = struct.pack(">Q", len(user.encode())) + user.encode()
    return hashlib.sha256(pre + content).digest()


def digest_signed(sig: bytes, user: str) -> bytes:
    pre = struct.pack(">Q", len(user.encode())) + user.encode()
    return hashlib.sha256(pre + sig).digest()


def bit_positions(digest: bytes, m: int, k: int):
    h1 = int.from_bytes(digest[:16], "big")
    h2 = int.from_bytes(digest[16:], "big")
    return [(h1 + i * h2) % m for i in range(k)]


def serialize_filter(m: int, k: int, n: int, inserted: int, set_bits) -> bytes:
    nbytes = (m + 7) // 8
    arr = bytearray(nbytes)
    for b in set_bits:
        arr[b >> 3] |= 1 << (b & 7)
    return (
        MAGIC
        + struct.pack(">H", VERSION)
        + struct.pack(">Q", m)
        + struct.pack(">H", k)
        + struct.pack(">Q", n)
        + struct.pack(">Q", inserted)
        + bytes(arr)
    )


def keypair(label: bytes):
    seed = hashlib.sha256(label).digest()
    sk = Ed25519PrivateKey.from_private_bytes(seed)
    pk = sk.public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw
    )
    return seed, sk, pk


def main():
    user = "a@b.c"

    # --- test-only signing keys (libsodium secret key layout: seed || pub) ---
    csp_seed, csp_sk, csp_pk = keypair(b"ppdp test-only csp key v1")
    usr_seed, usr_sk, usr_pk = keypair(b"ppdp test-only user key v1")
    keys = HERE / "keys"
    keys.mkdir(exist_ok=True)
    (keys / "test_only_csp.key").write_text((csp_seed + csp_pk).hex() + "\n")
    (keys / "test_only_csp.pub").write_text(csp_pk.hex() + "\n")
    (keys / "test_only_user.key").write_text((usr_seed + usr_pk).hex() + "\n")
    (keys / "test_only_user.pub").write_text(usr_pk.hex() + "\n")

    # --- golden snapshot: params(n=16, p=0.01) -> m=162, k=7; 3 insertions ---
    m, k, n = 162, 7, 16
    contents = [b"alpha\n", b"beta\n", b"gamma\n"]
    bits = []
    for c in contents:
        bits += bit_positions(digest_plain(c, user), m, k)
    snap3 = serialize_filter(m, k, n, len(contents), bits)
    (HERE / "filter3.bf").write_bytes(snap3)

    # --- golden feed record: single ingest of "hello evidence\n" on day 0 ---
    d = digest_plain(b"hello evidence\n", user)
    snap = serialize_filter(m, k, n, 1, bit_positions(d, m, k))
    (HERE / "day0.bf").write_bytes(snap)
    fh = hashlib.sha256(snap).hexdigest()
    preimage = (
        '{"day":0,"epoch":0,"filter_hash":"%s",'
        '"hash_alg":"sha256","sig_alg":"ed25519","user":"%s"}' % (fh, user)
    ).encode()
    sig = csp_sk.sign(preimage).hex()
    (HERE / "day0_record.json").write_text(
        '{"day":0,"epoch":0,"filter_hash":"%s","hash_alg":"sha256",'
        '"sig":"%s","sig_alg":"ed25519","user":"%s"}\n' % (fh, sig, user)
    )

    print("filter3.bf bytes:", len(snap3))
    print("day0 filter_hash:", fh)
    print("day0 record sig :", sig)
    print("csp pub:", csp_pk.hex())
    print("user pub:", usr_pk.hex())


if __name__ == "__main__":
    main()
