"""RC4 stream cipher (KSA + PRGA).

Plain RC4 with no dropped keystream prefix and no IV. RC4 has well-known
biases in its early keystream and must never be used with a reused key for
anything that needs confidentiality; it is kept here to emulate an existing
hardware link, not as a recommendation.
"""

from __future__ import annotations

from .errors import KeyLengthError


class Rc4State:
    """256-byte permutation ``S`` plus the PRGA indices ``i`` and ``j``.

    Single-owner and mutable: every keystream byte drawn advances the state.
    """

    __slots__ = ("S", "i", "j")

    def __init__(self, S, i: int = 0, j: int = 0):
        self.S = list(S)
        self.i = i
        self.j = j

    def copy(self) -> "Rc4State":
        return Rc4State(self.S, self.i, self.j)

    def __eq__(self, other):
        if not isinstance(other, Rc4State):
            return NotImplemented
        return self.S == other.S and self.i == other.i and self.j == other.j

    __hash__ = None

    def __repr__(self):
        return f"Rc4State(i={self.i}, j={self.j})"


def check_key(key: bytes) -> bytes:
    key = bytes(key)
    if not 1 <= len(key) <= 256:
        raise KeyLengthError(f"RC4 key must be 1..256 bytes, got {len(key)}")
    return key


def ksa(key: bytes) -> Rc4State:
    key = check_key(key)
    S = list(range(256))
    j = 0
    n = len(key)
    for i in range(256):
        j = (j + S[i] + key[i % n]) & 0xFF
        S[i], S[j] = S[j], S[i]
    return Rc4State(S)


def keystream(state: Rc4State, n: int) -> bytes:
    """Draw ``n`` keystream bytes, advancing ``state``."""
    if n < 0:
        raise ValueError("keystream length must be non-negative")
    S = state.S
    i, j = state.i, state.j
    out = bytearray(n)
    for k in range(n):
        i = (i + 1) & 0xFF
        si = S[i]
        j = (j + si) & 0xFF
        sj = S[j]
        S[i] = sj
        S[j] = si
        out[k] = S[(si + sj) & 0xFF]
    state.i, state.j = i, j
    return bytes(out)


def apply_keystream(state: Rc4State, data: bytes) -> bytes:
    """XOR ``data`` with the next ``len(data)`` keystream bytes. Encrypts and decrypts."""
    data = bytes(data)
    if not data:
        return b""
    ks = keystream(state, len(data))
    n = len(data)
    return (int.from_bytes(data, "big") ^ int.from_bytes(ks, "big")).to_bytes(n, "big")


def rc4(key: bytes, data: bytes) -> bytes:
    """One-shot encrypt/decrypt with a fresh state."""
    return apply_keystream(ksa(key), data)
