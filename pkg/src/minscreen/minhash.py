"""Seeded hash family, signatures, and the match-count estimator.

Each of the k slots carries its own keyed 64-bit mixing hash standing in for
an independent random permutation of the token universe. The per-slot hash
is fixed bit-for-bit so that independently written implementations produce
identical signatures:

    x = (token + key_add) mod 2**64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) mod 2**64
    x ^= x >> 27
    x = (x + key_mid) mod 2**64
    x = (x * 0x94D049BB133111EB) mod 2**64
    x ^= x >> 31

Addition, xor-shift, and multiplication by an odd constant are all bijective
mod 2**64, so for a fixed key the map is a permutation of the 64-bit domain:
distinct tokens never collide within a slot, only across slots. The two key
words per slot come from a splitmix64-style counter stream seeded by the
family master seed, which makes key material deterministic and pairwise
distinct.

A signature stores, per slot, the minimum keyed hash over the set's tokens.
The number of slot agreements between two signatures is then a binomial
sample whose success probability is the Jaccard similarity of the sets.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import AbstractSet

import numpy as np

from .sets import validate_tokens

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB

_NP_MULT1 = np.uint64(_MULT1)
_NP_MULT2 = np.uint64(_MULT2)
_NP_S30 = np.uint64(30)
_NP_S27 = np.uint64(27)
_NP_S31 = np.uint64(31)

_SIGN_CHUNK = 512


def slot_hash(token: int, key_add: int, key_mid: int) -> int:
    """Reference implementation of the per-slot keyed hash, one token at a
    time. sign() computes exactly this with numpy; tests hold the two paths
    bit-identical."""
    x = (token + key_add) & _MASK64
    x ^= x >> 30
    x = (x * _MULT1) & _MASK64
    x ^= x >> 27
    x = (x + key_mid) & _MASK64
    x = (x * _MULT2) & _MASK64
    x ^= x >> 31
    return x


def _mix_state(z: int) -> int:
    z ^= z >> 30
    z = (z * _MULT1) & _MASK64
    z ^= z >> 27
    z = (z * _MULT2) & _MASK64
    z ^= z >> 31
    return z


def derive_keys(master_seed: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Key words for k slots from a golden-ratio counter stream.

    Output j of the stream is _mix_state(master_seed + (j+1) * golden), the
    splitmix64 construction. Slot i uses outputs 2i and 2i+1. The finalizer
    is bijective and the counter states are distinct, so all stream outputs,
    and hence all per-slot key pairs, are pairwise distinct.
    """
    words = []
    state = master_seed
    for _ in range(2 * k):
        state = (state + _GOLDEN) & _MASK64
        words.append(_mix_state(state))
    key_add = np.array(words[0::2], dtype=np.uint64)
    key_mid = np.array(words[1::2], dtype=np.uint64)
    key_add.setflags(write=False)
    key_mid.setflags(write=False)
    return key_add, key_mid


def family_fingerprint(master_seed: int, k: int) -> str:
    digest = hashlib.blake2b(digest_size=16)
    digest.update(b"minscreen.family|")
    digest.update(master_seed.to_bytes(8, "little"))
    digest.update(k.to_bytes(8, "little"))
    return digest.hexdigest()


def reduced_fingerprint(base: str, bits: int) -> str:
    digest = hashlib.blake2b(digest_size=16)
    digest.update(f"{base}|b{bits}".encode("ascii"))
    return digest.hexdigest()


@dataclass(frozen=True)
class HashFamily:
    """k keyed hash slots derived deterministically from one master seed."""

    k: int
    master_seed: int
    key_add: np.ndarray
    key_mid: np.ndarray
    fingerprint: str


@dataclass(frozen=True)
class Signature:
    """Per-slot minima for one token set, tagged with the family it came
    from. bits is 64 for full-width values, smaller after to_b_bit."""

    values: np.ndarray
    fingerprint: str
    bits: int = 64

    @property
    def k(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class MatchCount:
    x: int
    k_examined: int


def make_family(k: int, master_seed: int) -> HashFamily:
    """Derive the keyed slots for a family of k hash functions."""
    if k < 1:
        raise ValueError(f"family size k must be at least 1, got {k}")
    if not 0 <= master_seed <= _MASK64:
        raise ValueError(f"master_seed must be an unsigned 64-bit integer, got {master_seed}")
    key_add, key_mid = derive_keys(master_seed, k)
    return HashFamily(
        k=k,
        master_seed=master_seed,
        key_add=key_add,
        key_mid=key_mid,
        fingerprint=family_fingerprint(master_seed, k),
    )


def sign(family: HashFamily, tokens: AbstractSet[int]) -> Signature:
    """Signature of a non-empty token set: slotwise minimum keyed hash."""
    if not tokens:
        raise ValueError("minhash undefined on empty set")
    validate_tokens(tokens)
    toks = np.fromiter(tokens, dtype=np.uint64, count=len(tokens))
    best = np.full(family.k, _MASK64, dtype=np.uint64)
    for start in range(0, len(toks), _SIGN_CHUNK):
        chunk = toks[start : start + _SIGN_CHUNK, np.newaxis]
        x = chunk + family.key_add
        x ^= x >> _NP_S30
        x *= _NP_MULT1
        x ^= x >> _NP_S27
        x += family.key_mid
        x *= _NP_MULT2
        x ^= x >> _NP_S31
        np.minimum(best, x.min(axis=0), out=best)
    best.setflags(write=False)
    return Signature(values=best, fingerprint=family.fingerprint, bits=64)


def match_count(a: Signature, b: Signature, upto: int) -> MatchCount:
    """Number of slots with equal values among the first upto slots."""
    if a.fingerprint != b.fingerprint:
        raise ValueError("signatures come from different hash families")
    if not 0 <= upto <= a.k:
        raise ValueError(f"upto must lie in [0, {a.k}], got {upto}")
    x = int(np.count_nonzero(a.values[:upto] == b.values[:upto]))
    return MatchCount(x=x, k_examined=upto)


def estimate(mc: MatchCount) -> float:
    """Similarity estimate x / k_examined from a match count."""
    if mc.k_examined < 1:
        raise ValueError("estimate undefined over zero examined slots")
    return mc.x / mc.k_examined


def estimator_variance(j: float, k: int) -> float:
    """Variance j(1-j)/k of the match-frequency estimator at similarity j."""
    if not 0.0 <= j <= 1.0:
        raise ValueError(f"similarity must lie in [0, 1], got {j}")
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return j * (1.0 - j) / k


def to_b_bit(sig: Signature, b: int) -> Signature:
    """Keep only the lowest b bits of every slot value.

    Cuts storage at the price of accidental slot collisions, which occur at
    rate 2**-b between slots that genuinely differ. Only full-width
    signatures can be reduced, and the result carries b in its fingerprint
    so it is never compared against signatures reduced differently.
    """
    if not 1 <= b <= 32:
        raise ValueError(f"b must lie in [1, 32], got {b}")
    if sig.bits != 64:
        raise ValueError(f"signature already reduced to {sig.bits} bits")
    values = sig.values & np.uint64((1 << b) - 1)
    values.setflags(write=False)
    return Signature(values=values, fingerprint=reduced_fingerprint(sig.fingerprint, b), bits=b)
