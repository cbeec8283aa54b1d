"""Division-free reduction by a fixed small modulus.

The modulus is fixed when the reducer is built, so its reciprocal is
precomputed once. At query time a residue costs one float multiply, one
integer multiply-subtract and at most two compare-subtract corrections.
Wide integers are split into 32-bit limbs and folded in Horner order, so
every intermediate stays below 2**52 where the float quotient estimate is
off by at most one.

Nothing in the query path uses ``%``, ``//``, ``divmod`` or ``pow``.
"""

from __future__ import annotations

import numpy as np

LIMB_BITS = 32
LIMB_MASK = (1 << LIMB_BITS) - 1
# keeps m**2 + 2**32 below 2**52 so the Horner fold stays exact
MAX_MODULUS = 1 << 25
_EXACT_FLOAT = 1 << 52

QUERY_TIME = ("reduce", "reduce_small", "reduce_array", "reduce_limbs", "mulmod", "_fix")


class ConstantModulus:
    """Residues modulo one fixed ``m`` without runtime division."""

    __slots__ = ("m", "inv", "limb_base")

    def __init__(self, m: int):
        if not 2 <= m < MAX_MODULUS:
            raise ValueError(f"modulus must be in [2, 2**25), got {m}")
        self.m = int(m)
        self.inv = 1.0 / self.m
        # 2**32 mod m, computed once at build time
        self.limb_base = (1 << LIMB_BITS) % self.m

    def __repr__(self) -> str:
        return f"ConstantModulus({self.m})"

    def reduce_small(self, n: int) -> int:
        """Residue of ``0 <= n < 2**52``."""
        m = self.m
        r = n - int(n * self.inv) * m
        if r < 0:
            r += m
        elif r >= m:
            r -= m
        return r

    def reduce(self, n: int) -> int:
        """Residue of any non-negative Python int."""
        if n < _EXACT_FLOAT:
            return self.reduce_small(n)
        nlimbs = (n.bit_length() + LIMB_BITS - 1) >> 5
        acc = 0
        shift = (nlimbs - 1) * LIMB_BITS
        while shift >= 0:
            acc = self.reduce_small(acc * self.limb_base + ((n >> shift) & LIMB_MASK))
            shift -= LIMB_BITS
        return acc

    def mulmod(self, u: int, v: int) -> int:
        """``u * v mod m`` for residues ``u, v < m``."""
        return self.reduce_small(u * v)

    def reduce_array(self, arr: np.ndarray) -> np.ndarray:
        """Element-wise residues of a non-negative integer array (int64 or uint64)."""
        arr = np.asarray(arr)
        if arr.dtype != np.uint64 and arr.size and arr.max() >= _EXACT_FLOAT:
            arr = arr.astype(np.uint64)
        if arr.dtype == np.uint64:
            hi = (arr >> np.uint64(LIMB_BITS)).astype(np.int64)
            lo = (arr & np.uint64(LIMB_MASK)).astype(np.int64)
            return self._fix(self._fix(hi) * self.limb_base + lo)
        return self._fix(arr.astype(np.int64, copy=False))

    def reduce_limbs(self, limbs: np.ndarray) -> np.ndarray:
        """Residues of wide integers given as an (n, L) array of 32-bit limbs,
        most significant limb first."""
        limbs = np.asarray(limbs, dtype=np.int64)
        acc = np.zeros(limbs.shape[0], dtype=np.int64)
        for j in range(limbs.shape[1]):
            acc = self._fix(acc * self.limb_base + limbs[:, j])
        return acc

    def _fix(self, a: np.ndarray) -> np.ndarray:
        m = self.m
        q = (a * self.inv).astype(np.int64)
        r = a - q * m
        r = np.where(r < 0, r + m, r)
        return np.where(r >= m, r - m, r)


def to_limbs(values, nlimbs: int = 0) -> np.ndarray:
    """Split non-negative Python ints into an (n, L) int64 array of 32-bit limbs."""
    values = list(values)
    if not nlimbs:
        top = max((v.bit_length() for v in values), default=1)
        nlimbs = max(1, (top + LIMB_BITS - 1) // LIMB_BITS)
    nbytes = nlimbs * 4
    buf = b"".join(v.to_bytes(nbytes, "big") for v in values)
    arr = np.frombuffer(buf, dtype=">u4").reshape(len(values), nlimbs)
    return arr.astype(np.int64)
