"""Finite-dimensional density-matrix algebra for the subject / object /
environment decomposition.

The demo Hilbert space is subject (neutral, happy, sad) x object (up, down),
ordered subject-major:

    (neutral,up) (neutral,down) (happy,up) (happy,down) (sad,up) (sad,down)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DensityMatrix",
    "TensorPartition",
    "LabeledBasis",
    "SUBJECT_OBJECT",
    "SO_BASIS",
    "pure",
    "evolve_unitary",
    "dephase",
    "ideal_measurement",
    "measurement_permutation",
    "snap_decision",
    "snap_decision_unitary",
    "spin_precession",
    "entropy",
    "mutual_information",
    "partial_trace",
    "fig4_sequence",
    "fig5_sequence",
    "to_json",
    "from_json",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10


class DensityMatrix:
    """Immutable Hermitian, unit-trace, positive semidefinite matrix."""

    __slots__ = ("_m",)

    def __init__(self, entries, validate: bool = True):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if validate:
            scale = max(1.0, float(np.max(np.abs(m))))
            if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * scale:
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(m)
            if abs(tr - 1) > TRACE_TOL * max(1.0, m.shape[0] ** 0.5):
                raise ValueError(f"density matrix trace is {tr}, expected 1")
            if np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) < -PSD_TOL:
                raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self._m + self._m.conj().T))

    def allclose(self, other, atol: float = 1e-12) -> bool:
        other = other.matrix if isinstance(other, DensityMatrix) else np.asarray(other)
        return bool(np.allclose(self._m, other, rtol=0, atol=atol))

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True)
class TensorPartition:
    factor_dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError("factor dims must be positive integers")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    def check(self, rho: DensityMatrix) -> None:
        if rho.dim != self.dim:
            raise ValueError(
                f"partition {self.factor_dims} has dimension {self.dim}, matrix has {rho.dim}"
            )

    def _index(self, i: int) -> int:
        if not 0 <= i < len(self.factor_dims):
            raise IndexError(f"factor index {i} out of range for {self.factor_dims}")
        return i


@dataclass(frozen=True)
class LabeledBasis:
    names: tuple

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))

    @classmethod
    def product(cls, *factors: Sequence[str]) -> "LabeledBasis":
        names = [""]
        for f in factors:
            names = [f"{a},{b}" if a else b for a in names for b in f]
        return cls(tuple(names))

    def index(self, name: str) -> int:
        return self.names.index(name)

    def ket(self, name: str) -> np.ndarray:
        v = np.zeros(len(self.names), dtype=complex)
        v[self.index(name)] = 1
        return v


SUBJECT = ("neutral", "happy", "sad")
OBJECT = ("up", "down")
SUBJECT_OBJECT = TensorPartition((3, 2))
SO_BASIS = LabeledBasis.product(SUBJECT, OBJECT)


def pure(psi) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))


def _check_unitary(U: np.ndarray, dim: int) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.shape != (dim, dim):
        raise ValueError(f"unitary must be {dim}x{dim}, got {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(dim))) > UNITARY_TOL:
        raise ValueError("matrix is not unitary")
    return U


def evolve_unitary(rho: DensityMatrix, U) -> DensityMatrix:
    """U rho U^dagger."""
    U = _check_unitary(U, rho.dim)
    m = U @ rho.matrix @ U.conj().T
    return DensityMatrix(0.5 * (m + m.conj().T))


def dephase(rho: DensityMatrix, partition: TensorPartition, pointer_factor: int,
            strength: float) -> DensityMatrix:
    """Scale coherences between different pointer states by (1 - strength).

    Elements whose pointer-factor indices differ are multiplied by
    ``1 - strength``; strength 1 is complete decoherence in that factor.
    """
    partition.check(rho)
    k = partition._index(pointer_factor)
    if not 0 <= strength <= 1:
        raise ValueError("strength must lie in [0, 1]")
    dims = partition.factor_dims
    idx = np.indices(dims).reshape(len(dims), -1)[k]  # pointer index of each basis state
    same = idx[:, None] == idx[None, :]
    mask = np.where(same, 1.0, 1.0 - strength)
    return DensityMatrix(rho.matrix * mask)


def measurement_permutation(basis: LabeledBasis = SO_BASIS,
                            mapping: dict | None = None) -> np.ndarray:
    """Permutation unitary implementing an ideal measurement.

    ``mapping`` sends basis labels to labels; it is completed to a
    permutation by sending each image back to its preimage (a swap) and
    fixing everything else. The default correlates the subject with the
    spin: neutral,up -> happy,up and neutral,down -> sad,down.
    """
    if mapping is None:
        mapping = {"neutral,up": "happy,up", "neutral,down": "sad,down"}
    n = len(basis.names)
    perm = list(range(n))
    for src, dst in mapping.items():
        i, j = basis.index(src), basis.index(dst)
        perm[i], perm[j] = j, i
    if sorted(perm) != list(range(n)):
        raise ValueError("mapping does not complete to a permutation")
    U = np.zeros((n, n))
    for i, j in enumerate(perm):
        U[j, i] = 1.0
    return U


def _is_permutation(U: np.ndarray) -> bool:
    A = np.abs(U)
    return (np.allclose(A[A > 0.5], 1.0) and np.allclose(A[A <= 0.5], 0.0)
            and np.all((A > 0.5).sum(axis=0) == 1) and np.all((A > 0.5).sum(axis=1) == 1))


def ideal_measurement(rho_so: DensityMatrix, partition: TensorPartition = SUBJECT_OBJECT,
                      correlation_map=None) -> DensityMatrix:
    """Apply a basis-permutation unitary that correlates subject with object."""
    partition.check(rho_so)
    U = measurement_permutation() if correlation_map is None else np.asarray(correlation_map)
    U = _check_unitary(U, rho_so.dim)
    if not _is_permutation(U):
        raise ValueError("correlation map must be a basis permutation")
    return evolve_unitary(rho_so, U)


def snap_decision_unitary() -> np.ndarray:
    """Real orthogonal 3x3 map with |neutral> -> (|happy> + |sad>)/sqrt 2.

    Completion: |happy> -> |neutral>/sqrt2 + (|happy> - |sad>)/2 and
    |sad> -> |neutral>/sqrt2 - (|happy> - |sad>)/2. The matrix is symmetric,
    so it is an involution: a second application returns |neutral> exactly.
    (No unitary can send |neutral> to |happy> in two steps, because
    U^2|neutral> is orthogonal to U|neutral>.)
    """
    r = 1 / math.sqrt(2)
    # columns are images of neutral, happy, sad
    return np.array([
        [0.0, r, r],
        [r, 0.5, -0.5],
        [r, -0.5, 0.5],
    ])


def snap_decision(rho_s: DensityMatrix, U_s=None) -> DensityMatrix:
    U_s = snap_decision_unitary() if U_s is None else U_s
    return evolve_unitary(rho_s, U_s)


def spin_precession(angle: float = math.pi / 2) -> np.ndarray:
    """Rotation about y; the default takes |up> to (|up> + |down>)/sqrt 2."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits; eigenvalues in [-1e-10, 0] count as 0."""
    lam = rho.eigenvalues()
    if np.min(lam) < -PSD_TOL:
        raise ValueError("density matrix is not positive semidefinite")
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)) + 0.0)


def partial_trace(rho: DensityMatrix, partition: TensorPartition,
                  keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix over the factors in ``keep`` (in their order)."""
    partition.check(rho)
    keep = sorted({partition._index(int(k)) for k in keep})
    if not keep:
        raise ValueError("keep set must not be empty")
    dims = partition.factor_dims
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = int(np.prod([dims[i] for i in keep]))
    return DensityMatrix(reduced.reshape(d, d))


def mutual_information(rho: DensityMatrix, partition: TensorPartition,
                       pair: tuple = (0, 1)) -> float:
    """S(rho_i) + S(rho_j) - S(rho_ij) in bits, for factors i != j."""
    i, j = (partition._index(int(p)) for p in pair)
    if i == j:
        raise ValueError("pair must name two different factors")
    joint = partial_trace(rho, partition, (i, j)) if len(partition.factor_dims) > 2 else rho
    return (entropy(partial_trace(rho, partition, (i,)))
            + entropy(partial_trace(rho, partition, (j,)))
            - entropy(joint))


# ---------------------------------------------------------------------------
# Demo sequences


def fig4_sequence() -> list[tuple[str, DensityMatrix]]:
    """Object precesses, decoheres, then is measured by the subject."""
    rho0 = pure(SO_BASIS.ket("neutral,up"))
    U_o = np.kron(np.eye(3), spin_precession())
    rho1 = evolve_unitary(rho0, U_o)
    rho2 = dephase(rho1, SUBJECT_OBJECT, 1, 1.0)
    rho3 = ideal_measurement(rho2, SUBJECT_OBJECT)
    return [("initial", rho0), ("object evolves", rho1),
            ("object decoheres", rho2), ("measurement", rho3)]


def fig5_sequence() -> list[tuple[str, DensityMatrix]]:
    """Subject makes a snap decision in isolation, then decoheres."""
    rho0 = pure(SO_BASIS.ket("neutral,up"))
    U_s = np.kron(snap_decision_unitary(), np.eye(2))
    rho1 = evolve_unitary(rho0, U_s)
    rho2 = dephase(rho1, SUBJECT_OBJECT, 0, 1.0)
    return [("initial", rho0), ("subject evolves", rho1), ("subject decoheres", rho2)]


# ---------------------------------------------------------------------------
# JSON: {"dim": n, "entries": [[re, im], ...]} row-major


def to_json(rho: DensityMatrix) -> dict:
    flat = rho.matrix.reshape(-1)
    return {"dim": rho.dim,
            "entries": [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in flat]}


def from_json(data) -> DensityMatrix:
    if isinstance(data, str):
        data = json.loads(data)
    dim = int(data["dim"])
    entries = data["entries"]
    if len(entries) != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, got {len(entries)}")
    m = np.array([complex(re, im) for re, im in entries]).reshape(dim, dim)
    return DensityMatrix(m)
