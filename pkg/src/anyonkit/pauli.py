"""Phase-tracked Pauli operators i^p X^x Z^z with packed integer bit vectors."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def popcount(v: int) -> int:
    return v.bit_count()


def mask_of(indices) -> int:
    out = 0
    for i in indices:
        out ^= 1 << int(i)
    return out


def bits_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class PauliOperator:
    """i^phase · Π_j X_j^{x_j} · Π_j Z_j^{z_j}, with all X factors to the left."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bit vector longer than the qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Label like 'XIZY', qubit 0 first."""
        x = z = phase = 0
        for j, ch in enumerate(label):
            if ch in "XY":
                x |= 1 << j
            if ch in "ZY":
                z |= 1 << j
            if ch == "Y":
                phase += 1  # Y = i X Z
            elif ch not in "IXZ":
                raise ValueError(f"bad Pauli letter {ch!r}")
        return cls(len(label), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        label = ["I"] * n
        label[qubit] = letter
        return cls.from_label("".join(label))

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def support(self) -> list[int]:
        return bits_of(self.x | self.z)

    def _check(self, other):
        if self.n != other.n:
            raise ValueError(f"qubit count mismatch: {self.n} vs {other.n}")

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        self._check(other)
        # moving Z^{z1} past X^{x2} costs (-1)^{|z1 ∧ x2|}
        phase = self.phase + other.phase + 2 * popcount(self.z & other.x)
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z, phase)

    def inverse(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, -self.phase + 2 * popcount(self.x & self.z))

    def symplectic(self, other: "PauliOperator") -> int:
        self._check(other)
        return (popcount(self.x & other.z) + popcount(self.z & other.x)) % 2

    def commutes_with(self, other: "PauliOperator") -> bool:
        return self.symplectic(other) == 0

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0 and self.phase == 0

    def scalar(self) -> complex:
        """The scalar i^phase when the operator has no X or Z part."""
        if self.x or self.z:
            raise ValueError("operator is not a multiple of the identity")
        return 1j ** self.phase

    def to_string(self) -> str:
        width = max(1, (self.n + 3) // 4)
        return f"i^{self.phase}|{self.x:0{width}x}|{self.z:0{width}x}"

    @classmethod
    def from_string(cls, text: str, n: int) -> "PauliOperator":
        head, xs, zs = text.split("|")
        if not head.startswith("i^"):
            raise ValueError(f"malformed Pauli string {text!r}")
        return cls(n, int(xs, 16), int(zs, 16), int(head[2:]))

    def to_matrix(self) -> np.ndarray:
        """Dense matrix; qubit j is bit j of the basis index."""
        xs = [_X if (self.x >> j) & 1 else _I2 for j in range(self.n)]
        zs = [_Z if (self.z >> j) & 1 else _I2 for j in range(self.n)]
        # kron puts its first factor on the most significant bit
        X = reduce(np.kron, reversed(xs), np.eye(1))
        Z = reduce(np.kron, reversed(zs), np.eye(1))
        return (1j ** self.phase) * (X @ Z)


def group_commutator(P: PauliOperator, Q: PauliOperator) -> PauliOperator:
    """P⁻¹ Q⁻¹ P Q."""
    return P.inverse() * Q.inverse() * P * Q
