"""Phase-free Pauli operator algebra on a fixed qubit register.

Operators are stored sparsely as the pair of index sets (x_support,
z_support); a qubit in both sets carries Y.  Phases are dropped
throughout: error tracking only ever needs the coset of an operator
modulo phase, and multiplication becomes the symplectic XOR of
supports.  Dense integer bitmasks are used internally for the GF(2)
linear algebra helpers at the bottom of the module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

_TOKEN = re.compile(r"^([XYZ])(\d+)$")


@dataclass(frozen=True)
class PauliOp:
    """A Pauli operator modulo phase on ``n_qubits`` qubits."""

    n_qubits: int
    x_support: frozenset
    z_support: frozenset

    def __post_init__(self):
        if self.x_support and max(self.x_support) >= self.n_qubits:
            raise ValueError("x_support index out of range")
        if self.z_support and min(self.z_support, default=0) < 0:
            raise ValueError("negative qubit index")
        if self.z_support and max(self.z_support) >= self.n_qubits:
            raise ValueError("z_support index out of range")

    # -- constructors ------------------------------------------------

    @staticmethod
    def identity(n_qubits: int) -> "PauliOp":
        return PauliOp(n_qubits, frozenset(), frozenset())

    @staticmethod
    def from_support(n_qubits: int, xs: Iterable[int] = (), zs: Iterable[int] = ()) -> "PauliOp":
        return PauliOp(n_qubits, frozenset(xs), frozenset(zs))

    @staticmethod
    def single(n_qubits: int, kind: str, qubit: int) -> "PauliOp":
        """One-qubit X, Y or Z factor embedded in the register."""
        if kind == "X":
            return PauliOp(n_qubits, frozenset((qubit,)), frozenset())
        if kind == "Z":
            return PauliOp(n_qubits, frozenset(), frozenset((qubit,)))
        if kind == "Y":
            return PauliOp(n_qubits, frozenset((qubit,)), frozenset((qubit,)))
        raise ValueError(f"unknown Pauli kind {kind!r}")

    @staticmethod
    def from_text(text: str, n_qubits: int) -> "PauliOp":
        """Parse the textual form, e.g. ``"X0 Z3 Y7"``; ``"I"`` is identity."""
        xs, zs = set(), set()
        text = text.strip()
        if text in ("", "I"):
            return PauliOp.identity(n_qubits)
        for token in text.split():
            m = _TOKEN.match(token)
            if not m:
                raise ValueError(f"bad Pauli token {token!r}")
            kind, q = m.group(1), int(m.group(2))
            if kind in ("X", "Y"):
                xs.add(q)
            if kind in ("Z", "Y"):
                zs.add(q)
        return PauliOp(n_qubits, frozenset(xs), frozenset(zs))

    @staticmethod
    def from_masks(n_qubits: int, x_mask: int, z_mask: int) -> "PauliOp":
        xs = frozenset(_mask_bits(x_mask))
        zs = frozenset(_mask_bits(z_mask))
        return PauliOp(n_qubits, xs, zs)

    # -- views -------------------------------------------------------

    @property
    def support(self):
        return self.x_support | self.z_support

    @property
    def x_mask(self) -> int:
        return _bits_mask(self.x_support)

    @property
    def z_mask(self) -> int:
        return _bits_mask(self.z_support)

    def kind_on(self, qubit: int) -> str:
        x = qubit in self.x_support
        z = qubit in self.z_support
        if x and z:
            return "Y"
        if x:
            return "X"
        if z:
            return "Z"
        return "I"

    def to_text(self) -> str:
        if not self.support:
            return "I"
        return " ".join(f"{self.kind_on(q)}{q}" for q in sorted(self.support))

    def is_identity(self) -> bool:
        return not self.x_support and not self.z_support

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return multiply(self, other)

    def __repr__(self):
        return f"PauliOp({self.n_qubits}, {self.to_text()!r})"


def multiply(a: PauliOp, b: PauliOp) -> PauliOp:
    """Phase-free product: symplectic XOR of the supports."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("operator size mismatch")
    return PauliOp(a.n_qubits, a.x_support ^ b.x_support, a.z_support ^ b.z_support)


def commutes(a: PauliOp, b: PauliOp) -> bool:
    """True iff the symplectic inner product of a and b is even."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("operator size mismatch")
    overlap = len(a.x_support & b.z_support) + len(a.z_support & b.x_support)
    return overlap % 2 == 0


def weight(a: PauliOp) -> int:
    return len(a.x_support | a.z_support)


def restrict(a: PauliOp, basis: str) -> PauliOp:
    """Keep only the X-part or Z-part; a Y contributes to both parts.

    ``basis`` is "X" or "Z".  Splitting a depolarizing error this way
    yields the two independent decoding problems of a CSS code.
    """
    if basis == "X":
        return PauliOp(a.n_qubits, a.x_support, frozenset())
    if basis == "Z":
        return PauliOp(a.n_qubits, frozenset(), a.z_support)
    raise ValueError(f"basis must be 'X' or 'Z', got {basis!r}")


# -- GF(2) linear algebra on integer bitmasks -----------------------


def _bits_mask(bits: Iterable[int]) -> int:
    m = 0
    for b in bits:
        m |= 1 << b
    return m


def _mask_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class F2Basis:
    """Incrementally row-reduced basis of GF(2) vectors (integer bitmasks).

    Supports membership-in-span tests; used to check stabilizers
    against gauge products and to reduce residual errors modulo a
    generator set.
    """

    def __init__(self, rows: Iterable[int] = ()):
        self._rows = []  # list of (pivot_bit, mask), pivots strictly decreasing
        for r in rows:
            self.add(r)

    def reduce(self, mask: int) -> int:
        for pivot, row in self._rows:
            if (mask >> pivot) & 1:
                mask ^= row
        return mask

    def add(self, mask: int) -> bool:
        """Insert a vector; returns False if it was already in the span."""
        mask = self.reduce(mask)
        if mask == 0:
            return False
        # each stored row has its pivot as highest set bit, so a single
        # pass over rows in decreasing pivot order fully reduces a vector
        pivot = mask.bit_length() - 1
        self._rows.append((pivot, mask))
        self._rows.sort(key=lambda pr: -pr[0])
        return True

    def contains(self, mask: int) -> bool:
        return self.reduce(mask) == 0

    def __len__(self):
        return len(self._rows)


def symplectic_mask(p: PauliOp) -> int:
    """Pack (x_mask, z_mask) into one 2n-bit vector for span tests."""
    return p.x_mask | (p.z_mask << p.n_qubits)


def pauli_span(ops: Iterable[PauliOp]) -> F2Basis:
    return F2Basis(symplectic_mask(p) for p in ops)


def in_span(p: PauliOp, basis: F2Basis) -> bool:
    return basis.contains(symplectic_mask(p))
