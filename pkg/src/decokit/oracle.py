"""Brute-force grid checks of the analytic suppression factors.

Everything here works on plain floats in a caller-chosen unit system; pass
``hbar`` explicitly (SI by default). Two independent routes are provided:

* a 1-D two-particle grid evolved under the interaction alone, whose
  numerically traced-out reduced matrix is compared with the Gaussian
  tidal factor;
* a discrete Wigner transform, in which a momentum-kick convolution is
  applied directly in phase space and compared with multiplying the
  position-basis density matrix by the kick's characteristic function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional, Sequence

import numpy as np

from .units import CONSTANTS

__all__ = [
    "HBAR_SI",
    "MotionError",
    "Grid1D",
    "gaussian_grid",
    "cat_grid",
    "TwoParticleState",
    "QuadraticPotential",
    "evolve_two_particle",
    "reduced_density",
    "SuppressionField",
    "reduce_and_compare",
    "gaussian_tidal_suppression",
    "WignerGrid",
    "wigner_transform",
    "inverse_wigner",
    "KickDistribution",
    "momentum_kick",
    "multiply_suppression",
    "tidal_kick_distribution",
    "kick_characteristic",
    "OracleRecord",
    "gaussian_agreement",
    "phase_only_change",
    "wigner_duality",
    "standard_suite",
]

HBAR_SI = float(CONSTANTS.hbar.value)
#: "displacement << spacing" is enforced as displacement < MOTION_RATIO * spacing
MOTION_RATIO = 0.1


class MotionError(ValueError):
    """Particle motion during t is not negligible against the grid spacing."""


@dataclass(frozen=True, eq=False)
class Grid1D:
    points: int
    extent: float
    values: np.ndarray

    def __post_init__(self):
        n = int(self.points)
        if n < 2 or n & (n - 1):
            raise ValueError(f"points must be a power of two, got {n}")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (n,):
            raise ValueError(f"values must have shape ({n},)")
        if not self.extent > 0:
            raise ValueError("extent must be positive")
        norm = np.sum(np.abs(vals) ** 2) * self.extent / n
        if abs(norm - 1) > 1e-9:
            raise ValueError(f"grid wavefunction is not normalised (norm {norm})")
        object.__setattr__(self, "values", vals)

    @property
    def spacing(self) -> float:
        return self.extent / self.points

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.spacing

    @property
    def density(self) -> np.ndarray:
        """Position-basis density matrix rho(x, x') (continuum normalisation)."""
        return np.outer(self.values, self.values.conj())


def _normalised(x: np.ndarray, psi: np.ndarray) -> np.ndarray:
    dx = x[1] - x[0]
    return psi / math.sqrt(np.sum(np.abs(psi) ** 2) * dx)


def gaussian_grid(spread: float, points: int = 256, extent: Optional[float] = None,
                  center: float = 0.0, momentum: float = 0.0, hbar: float = HBAR_SI) -> Grid1D:
    """Gaussian whose |psi|^2 has standard deviation ``spread``.

    Default extent is 20 spreads.
    """
    extent = 20 * spread if extent is None else extent
    x = (np.arange(points) - points // 2) * (extent / points)
    psi = np.exp(-((x - center) ** 2) / (4 * spread ** 2) + 1j * momentum * x / hbar)
    return Grid1D(points, extent, _normalised(x, psi))


def cat_grid(spread: float, separation: float, points: int = 256,
             extent: Optional[float] = None) -> Grid1D:
    """Equal superposition of two Gaussians at +/- separation/2."""
    extent = 20 * spread + 2 * separation if extent is None else extent
    x = (np.arange(points) - points // 2) * (extent / points)
    g = lambda c: np.exp(-((x - c) ** 2) / (4 * spread ** 2))
    return Grid1D(points, extent, _normalised(x, g(-separation / 2) + g(separation / 2)))


# ---------------------------------------------------------------------------
# Two-particle evolution


@dataclass(frozen=True)
class QuadraticPotential:
    """V(y) = V0 - F y + M y^2 / 2 in the relative coordinate y = x2 - x1."""

    V0: float = 0.0
    F: float = 0.0
    M: float = 0.0

    def __call__(self, y):
        return self.V0 - self.F * y + 0.5 * self.M * y ** 2

    def force_on_1(self, y):
        """-dV/dx1 = V'(y)."""
        return -self.F + self.M * y


@dataclass(frozen=True, eq=False)
class TwoParticleState:
    grid1: Grid1D
    grid2: Grid1D
    joint: np.ndarray
    mass1: float
    mass2: float
    initial: Optional["TwoParticleState"] = field(default=None, repr=False)

    @classmethod
    def separable(cls, grid1: Grid1D, grid2: Grid1D, mass1: float, mass2: float) -> "TwoParticleState":
        if not (mass1 > 0 and mass2 > 0):
            raise ValueError("masses must be positive")
        return cls(grid1, grid2, np.outer(grid1.values, grid2.values), mass1, mass2)

    def __post_init__(self):
        j = np.asarray(self.joint, dtype=complex)
        if j.shape != (self.grid1.points, self.grid2.points):
            raise ValueError("joint wavefunction shape does not match the grids")
        norm = np.sum(np.abs(j) ** 2) * self.grid1.spacing * self.grid2.spacing
        if abs(norm - 1) > 1e-9:
            raise ValueError(f"joint wavefunction not normalised (norm {norm})")
        object.__setattr__(self, "joint", j)


def _check_motion(state: TwoParticleState, potential: QuadraticPotential, t: float) -> None:
    g1, g2 = state.grid1, state.grid2
    reach = 0.5 * (g1.extent + g2.extent)
    max_force = abs(potential.F) + abs(potential.M) * reach
    for m, g, label in ((state.mass1, g1, "1"), (state.mass2, g2, "2")):
        shift = max_force * t ** 2 / (2 * m)
        if shift >= MOTION_RATIO * g.spacing:
            raise MotionError(
                f"particle {label} moves {shift:.3g} during t, not << spacing {g.spacing:.3g}"
            )


def evolve_two_particle(state: TwoParticleState, potential: QuadraticPotential, t: float,
                        hbar: float = HBAR_SI, check_motion: bool = True) -> TwoParticleState:
    """Multiply the joint wavefunction by exp[-i V(x2 - x1) t / hbar].

    Kinetic terms are dropped; ``check_motion`` guards that approximation.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if check_motion:
        _check_motion(state, potential, t)
    y = state.grid2.x[None, :] - state.grid1.x[:, None]
    phase = np.exp(-1j * potential(y) * t / hbar)
    return TwoParticleState(state.grid1, state.grid2, state.joint * phase,
                            state.mass1, state.mass2, initial=state.initial or state)


def reduced_density(state: TwoParticleState) -> np.ndarray:
    """rho1(x1, x1') = sum_x2 Psi(x1, x2) Psi*(x1', x2) dx2."""
    return state.joint @ state.joint.conj().T * state.grid2.spacing


@dataclass(frozen=True, eq=False)
class SuppressionField:
    """Measured f(x1, x1') and the mask of entries where it is defined."""

    x: np.ndarray
    f: np.ndarray
    mask: np.ndarray

    @property
    def magnitude(self) -> np.ndarray:
        return np.where(self.mask, np.abs(self.f), np.nan)


def reduce_and_compare(state: TwoParticleState, threshold: float = 1e-8) -> SuppressionField:
    """Trace out particle 2 and divide by the initial reduced matrix.

    Entries whose initial |rho1| (relative to its peak) is below
    ``threshold`` are masked out.
    """
    if state.initial is None:
        raise ValueError("state has no recorded initial state; evolve it first")
    rho_t = reduced_density(state)
    rho_0 = reduced_density(state.initial)
    peak = np.max(np.abs(rho_0))
    mask = np.abs(rho_0) > threshold * peak
    if not mask.any():
        raise ValueError("initial reduced matrix is below threshold everywhere")
    f = np.zeros_like(rho_t)
    f[mask] = rho_t[mask] / rho_0[mask]
    return SuppressionField(state.grid1.x, f, mask)


def gaussian_tidal_suppression(x: np.ndarray, M: float, spread: float, t: float,
                               hbar: float = HBAR_SI) -> np.ndarray:
    """exp[-(x' - x)^2 M^2 spread^2 t^2 / (2 hbar^2)] on an x grid."""
    d = x[None, :] - x[:, None]
    return np.exp(-0.5 * d ** 2 * M ** 2 * spread ** 2 * t ** 2 / hbar ** 2)


# ---------------------------------------------------------------------------
# Discrete Wigner function
#
# For a grid with spacing dx the density matrix is rewritten in (centre,
# difference) coordinates. Index pairs (a, b) with a + b even have centres on
# the grid ("even sheet", the physical Wigner function); pairs with a + b odd
# have half-grid centres ("odd sheet") and are kept so the transform is
# exactly invertible. Momenta are p_m = m pi hbar / (N dx), m in [-N/2, N/2).


@dataclass(frozen=True, eq=False)
class WignerGrid:
    x: np.ndarray  # grid-point centres (even sheet)
    p: np.ndarray
    values: np.ndarray  # (N, N) real
    odd_values: np.ndarray  # (N - 1, N) real, centres at x + dx/2
    hbar: float

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    def position_marginal(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.dp

    def momentum_marginal(self) -> np.ndarray:
        return self.values.sum(axis=0) * self.dx

    def total(self) -> float:
        return float(self.values.sum() * self.dx * self.dp)


def _wigner_indices(n: int, odd: bool):
    k = np.arange(-(n // 2), n // 2)
    centres = np.arange(n - 1 if odd else n)
    rows = centres[:, None] + k[None, :] + (1 if odd else 0)
    cols = centres[:, None] - k[None, :]
    valid = (rows >= 0) & (rows < n) & (cols >= 0) & (cols < n)
    return k, np.clip(rows, 0, n - 1), np.clip(cols, 0, n - 1), valid


def _phase_matrix(n: int, odd: bool) -> np.ndarray:
    """E[k, m] = exp(-i pi m d / N) with d = 2k (+1 on the odd sheet)."""
    k = np.arange(-(n // 2), n // 2)
    m = np.arange(-(n // 2), n // 2)
    d = 2 * k + (1 if odd else 0)
    return np.exp(-1j * np.pi * np.outer(d, m) / n)


def wigner_transform(rho: np.ndarray, x: np.ndarray, hbar: float = HBAR_SI,
                     imag_tol: float = 1e-9) -> WignerGrid:
    """W(X, p) = (1 / 2 pi hbar) int rho(X + y/2, X - y/2) exp(-i p y / hbar) dy."""
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    if rho.shape != (n, n) or len(x) != n:
        raise ValueError("rho must be square and match the x grid")
    scale = np.max(np.abs(rho)) or 1.0
    if np.max(np.abs(rho - rho.conj().T)) > 1e-12 * scale:
        raise ValueError("grid density matrix is not Hermitian")
    dx = float(x[1] - x[0])
    # dy = 2 dx on each sheet
    norm = 2 * dx / (2 * np.pi * hbar)
    sheets = []
    for odd in (False, True):
        _, rows, cols, valid = _wigner_indices(n, odd)
        A = np.where(valid, rho[rows, cols], 0)
        W = norm * (A @ _phase_matrix(n, odd))
        if np.max(np.abs(W.imag)) > imag_tol * max(1.0, np.max(np.abs(W.real))):
            raise ValueError("Wigner function has a non-negligible imaginary part")
        sheets.append(W.real)
    p = np.arange(-(n // 2), n // 2) * np.pi * hbar / (n * dx)
    return WignerGrid(np.asarray(x, dtype=float), p, sheets[0], sheets[1], hbar)


def inverse_wigner(W: WignerGrid) -> np.ndarray:
    """Rebuild the position-basis density matrix from both sheets."""
    n = len(W.x)
    norm = 2 * W.dx / (2 * np.pi * W.hbar)
    rho = np.zeros((n, n), dtype=complex)
    for odd, values in ((False, W.values), (True, W.odd_values)):
        _, rows, cols, valid = _wigner_indices(n, odd)
        E = _phase_matrix(n, odd)
        A = (values @ E.conj().T) / (n * norm)
        rho[rows[valid], cols[valid]] = A[valid]
    return rho


@dataclass(frozen=True)
class KickDistribution:
    """Momentum-transfer distribution on the lattice q = offset * dp."""

    offsets: tuple
    weights: tuple

    def __post_init__(self):
        off = tuple(int(o) for o in self.offsets)
        w = np.asarray(self.weights, dtype=float)
        if len(off) != len(w) or not off:
            raise ValueError("need one weight per offset")
        if np.any(w < 0):
            raise ValueError("kick weights must be non-negative")
        if abs(w.sum() - 1) > 1e-12:
            raise ValueError(f"kick distribution is not normalised (sum {w.sum()})")
        object.__setattr__(self, "offsets", off)
        object.__setattr__(self, "weights", tuple(float(v) for v in w))

    @classmethod
    def from_density(cls, density: Callable[[np.ndarray], np.ndarray], dp: float,
                     max_offset: int, norm_tol: float = 1e-6) -> "KickDistribution":
        """Sample a continuous p(q) on the lattice; it must integrate to 1."""
        off = np.arange(-max_offset, max_offset + 1)
        w = np.asarray(density(off * dp), dtype=float) * dp
        if abs(w.sum() - 1) > norm_tol:
            raise ValueError(f"p(q) is not normalised on the lattice (integral {w.sum():.6g})")
        return cls(tuple(off), tuple(w / w.sum()))

    def characteristic(self, y: np.ndarray, dp: float, hbar: float) -> np.ndarray:
        """sum_j w_j exp(i q_j y / hbar), i.e. p_hat(-y / hbar)."""
        q = np.asarray(self.offsets) * dp
        return np.exp(1j * np.multiply.outer(y, q) / hbar) @ np.asarray(self.weights)


def _shift_sheet(values: np.ndarray, offset: int, antiperiodic: bool) -> np.ndarray:
    """values[:, m - offset] with (anti)periodic continuation in m."""
    return values @ _kick_kernel(values.shape[1], (offset,), (1.0,), antiperiodic)


def _kick_kernel(n: int, offsets, weights, antiperiodic: bool) -> np.ndarray:
    """K with (values @ K)[:, m] = sum_j w_j values[:, m - o_j], continued
    periodically (even sheet) or antiperiodically (odd sheet)."""
    K = np.zeros((n, n))
    m = np.arange(n)
    for o, w in zip(offsets, weights):
        src = m - o
        sign = np.where(np.floor_divide(src, n) % 2, -1.0, 1.0) if antiperiodic else 1.0
        K[np.mod(src, n), m] += w * sign
    return K


def momentum_kick(W: WignerGrid, kick: KickDistribution) -> WignerGrid:
    """W(x, p) -> sum_q W(x, p - q) p(q): convolution along momentum."""
    n = W.values.shape[1]
    even = W.values @ _kick_kernel(n, kick.offsets, kick.weights, antiperiodic=False)
    odd = W.odd_values @ _kick_kernel(n, kick.offsets, kick.weights, antiperiodic=True)
    return WignerGrid(W.x, W.p, even, odd, W.hbar)


def multiply_suppression(rho: np.ndarray, x: np.ndarray, kick: KickDistribution,
                         dp: float, hbar: float = HBAR_SI) -> np.ndarray:
    """rho(x, x') * p_hat((x' - x) / hbar) for a lattice kick distribution."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    dx = x[1] - x[0]
    if not np.allclose(np.diff(x), dx, rtol=1e-12, atol=0):
        raise ValueError("x grid must be uniform")
    # x_i - x_j depends only on i - j: evaluate the 2n - 1 distinct values once
    lags = np.arange(-(n - 1), n)
    chi = kick.characteristic(lags * dx, dp, hbar)
    i = np.arange(n)
    return np.asarray(rho) * chi[(i[:, None] - i[None, :]) + n - 1]


# ---------------------------------------------------------------------------
# Tidal field as a momentum-transfer distribution


def tidal_kick_distribution(x2: np.ndarray, p2: np.ndarray, M: float, t: float,
                            x1: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Density of q = M (x2 - x1) t for x2 distributed as p2 (1-D).

    Returns the q samples and p(q) = p2(x2) / (|M| t), both on the image of
    the x2 grid.
    """
    if M == 0 or t <= 0:
        raise ValueError("need M != 0 and t > 0 for a non-degenerate kick")
    q = M * (np.asarray(x2) - x1) * t
    return q, np.asarray(p2) / (abs(M) * t)


def kick_characteristic(q: np.ndarray, density: np.ndarray, k: np.ndarray) -> np.ndarray:
    """p_hat(k) = int p(q) exp(-i k q) dq by a Riemann sum on uniform q."""
    dq = abs(q[1] - q[0])
    return np.exp(-1j * np.multiply.outer(k, q)) @ density * dq


# ---------------------------------------------------------------------------


@dataclass
class OracleRecord:
    test: str
    grid: dict
    analytic_value: float
    measured_value: float
    relative_error: float

    def to_dict(self) -> dict:
        return asdict(self)


def _grid_info(g: Grid1D) -> dict:
    return {"points": g.points, "extent": g.extent, "spacing": g.spacing}


def gaussian_agreement(spread1: float = 1.0, spread2: float = 0.7, M: float = 1.0,
                       t: float = 1.0, points: int = 256, hbar: float = 1.0,
                       exponent_range: tuple = (0.1, 3.0)) -> OracleRecord:
    """Worst relative error of the grid |f| against the Gaussian tidal factor
    over entries whose analytic exponent lies in ``exponent_range``."""
    g1 = gaussian_grid(spread1, points, hbar=hbar)
    g2 = gaussian_grid(spread2, points, hbar=hbar)
    state = TwoParticleState.separable(g1, g2, 1e12, 1e12)
    evolved = evolve_two_particle(state, QuadraticPotential(0.0, 0.0, M), t, hbar=hbar)
    field_ = reduce_and_compare(evolved)
    analytic = gaussian_tidal_suppression(g1.x, M, spread2, t, hbar=hbar)
    with np.errstate(divide="ignore"):
        exponent = -np.log(analytic)
    sel = field_.mask & (exponent >= exponent_range[0]) & (exponent <= exponent_range[1])
    if not sel.any():
        raise ValueError("no grid entries fall in the requested exponent range")
    rel = np.abs(np.abs(field_.f[sel]) - analytic[sel]) / analytic[sel]
    worst = int(np.argmax(rel))
    return OracleRecord(
        test=f"gaussian tidal suppression (t={t:g})",
        grid={"particle1": _grid_info(g1), "particle2": _grid_info(g2), "entries": int(sel.sum())},
        analytic_value=float(analytic[sel][worst]),
        measured_value=float(np.abs(field_.f[sel])[worst]),
        relative_error=float(rel[worst]),
    )


def phase_only_change(F: float = 2.0, points: int = 256, hbar: float = 1.0) -> OracleRecord:
    """Largest change of any |rho1| entry under a linear (M = 0) potential."""
    g1 = gaussian_grid(1.0, points, hbar=hbar)
    g2 = gaussian_grid(0.7, points, hbar=hbar)
    state = TwoParticleState.separable(g1, g2, 1e12, 1e12)
    evolved = evolve_two_particle(state, QuadraticPotential(0.3, F, 0.0), 1.0, hbar=hbar)
    before = np.abs(reduced_density(state))
    after = np.abs(reduced_density(evolved))
    change = float(np.max(np.abs(after - before)))
    return OracleRecord("phase-only coupling leaves |rho1| unchanged",
                        {"particle1": _grid_info(g1), "particle2": _grid_info(g2)},
                        0.0, change, change)


def wigner_duality(n_kicks: int = 20, points: int = 256, seed: int = 0,
                   hbar: float = 1.0) -> OracleRecord:
    """Worst per-entry mismatch between phase-space convolution and
    position-space multiplication over random kick distributions."""
    rng = np.random.default_rng(seed)
    psi = cat_grid(0.6, 4.0, points)
    x = psi.x
    rho = psi.density
    W = wigner_transform(rho, x, hbar=hbar)
    worst = 0.0
    for _ in range(n_kicks):
        width = int(rng.integers(1, points // 2))
        offsets = np.arange(-width, width + 1)
        weights = rng.random(offsets.size)
        weights /= weights.sum()
        kick = KickDistribution(tuple(offsets), tuple(weights))
        via_wigner = inverse_wigner(momentum_kick(W, kick))
        direct = multiply_suppression(rho, x, kick, W.dp, hbar=hbar)
        worst = max(worst, float(np.max(np.abs(via_wigner - direct))))
    return OracleRecord("wigner convolution equals position-space multiplication",
                        {"points": points, "kicks": n_kicks}, 0.0, worst, worst)


def standard_suite() -> list[OracleRecord]:
    records = [gaussian_agreement(t=t) for t in (0.5, 1.0, 2.0)]
    records.append(phase_only_change())
    records.append(wigner_duality())
    return records
