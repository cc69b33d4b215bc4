"""Truncated cavity (x) two-level-atom Hilbert space and its elementary operators.

Basis index is ``2 * n + s`` with ``n`` the photon number and ``s = 0`` (ground)
or ``s = 1`` (excited), so the atom is the fast inner index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, TruncationError

MIN_N_MAX = 3


@dataclass(frozen=True)
class FockQubitSpace:
    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < MIN_N_MAX:
            raise TruncationError(
                f"n_max must be an integer >= {MIN_N_MAX}, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def index(self, n: int, s: int) -> int:
        """Basis index of ``|n, s>``; ``s`` is 0 for g and 1 for e."""
        if not 0 <= n <= self.n_max or s not in (0, 1):
            raise IndexError(f"|{n},{s}> is outside the truncated space")
        return 2 * n + s

    def basis_vector(self, n: int, s: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(n, s)] = 1.0
        return v


@dataclass(frozen=True, eq=False)
class Operator:
    space: FockQubitSpace
    matrix: np.ndarray
    label: str = field(default="")

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise DimensionMismatchError(
                f"matrix shape {m.shape} does not match space dim {self.space.dim}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: Operator) -> Operator:
        return multiply(self, other)

    def __add__(self, other: Operator) -> Operator:
        return add_scaled(self, 1.0, other)

    def __sub__(self, other: Operator) -> Operator:
        return add_scaled(self, -1.0, other)

    def __mul__(self, c: complex) -> Operator:
        return Operator(self.space, c * self.matrix, self.label)

    __rmul__ = __mul__

    @property
    def dag(self) -> Operator:
        return adjoint(self)


def make_space(n_max: int) -> FockQubitSpace:
    return FockQubitSpace(n_max)


def _check_same(*ops: Operator) -> FockQubitSpace:
    space = ops[0].space
    for op in ops[1:]:
        if op.space != space:
            raise DimensionMismatchError(
                f"operator on n_max={op.space.n_max} mixed with n_max={space.n_max}")
    return space


def annihilation(space: FockQubitSpace) -> Operator:
    a_field = np.diag(np.sqrt(np.arange(1, space.n_max + 1)), k=1)
    return Operator(space, np.kron(a_field, np.eye(2)), "a")


def creation(space: FockQubitSpace) -> Operator:
    return adjoint(annihilation(space))


def sigma_minus(space: FockQubitSpace) -> Operator:
    # |g><e| with g -> 0, e -> 1
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])
    return Operator(space, np.kron(np.eye(space.n_max + 1), lower), "sm")


def sigma_plus(space: FockQubitSpace) -> Operator:
    return adjoint(sigma_minus(space))


def identity(space: FockQubitSpace) -> Operator:
    return Operator(space, np.eye(space.dim), "1")


def number_operator(space: FockQubitSpace) -> Operator:
    a = annihilation(space)
    return Operator(space, a.matrix.conj().T @ a.matrix, "n")


def adjoint(op: Operator) -> Operator:
    label = op.label[:-1] if op.label.endswith("'") else op.label + "'"
    return Operator(op.space, op.matrix.conj().T, label)


def multiply(A: Operator, B: Operator) -> Operator:
    space = _check_same(A, B)
    return Operator(space, A.matrix @ B.matrix, f"{A.label}{B.label}")


def add_scaled(A: Operator, c: complex, B: Operator) -> Operator:
    """Return ``A + c * B``."""
    space = _check_same(A, B)
    return Operator(space, A.matrix + c * B.matrix, f"{A.label}+{B.label}")


def commutator(A: Operator, B: Operator) -> Operator:
    return add_scaled(multiply(A, B), -1.0, multiply(B, A))


def expectation_in_vector(A: Operator, v) -> complex:
    v = np.asarray(v, dtype=complex)
    if v.shape != (A.space.dim,):
        raise DimensionMismatchError(
            f"vector of shape {v.shape} on space of dim {A.space.dim}")
    return complex(np.vdot(v, A.matrix @ v))
