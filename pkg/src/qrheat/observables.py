"""Derived physical quantities: rectification, squeezing, weak-coupling current.

The steady state is diagonal in the dressed basis, so photon quadrature
moments reduce to branch-local sums: writing the bare mode in terms of the
branch mode, ``a = f A - g A^dag``, gives ``<X^2> = (f - g)^2 (2n + 1)`` and
``<P^2> = (f + g)^2 (2n + 1)`` per dressed state with vanishing cross moment.
The minimum quadrature variance over the rotation angle defines the
squeezing factor; values below one flag squeezed photon noise.

The weak-coupling current is the closed-form leading-order expression built
from two families of cyclic transitions through the qubit flip with
two-photon sidebands; it serves as an independent oracle for the full
master-equation current at small coupling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .baths import BathSpec, bose_occupation, spectral_density
from .errors import BothCurrentsZero, CutoffUnconverged, TooFewPoints
from .spectrum import BranchData, SystemParams

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# Relative tail bound for the weak-coupling component sum.
_TAIL_TOL = 1e-10
# Components are always reported at least up to here (decay diagnostics).
_M_MIN = 12
_M_CAP = 100_000


@dataclass(frozen=True)
class RectificationResult:
    """Forward/reverse currents and the rectification factor."""

    forward_current: float
    reverse_current: float
    factor: float


def rectification(j_forward: float, j_reverse: float) -> RectificationResult:
    """Rectification factor from the two opposite-bias currents.

    Zero means complete reciprocity (``J(-dT) = -J(dT)``), one means ideal
    diode behaviour.  Symmetric under exchanging the two currents.

    Raises
    ------
    BothCurrentsZero
        When both currents vanish (the factor is undefined at zero bias).
    """
    scale = max(abs(j_forward), abs(j_reverse))
    if scale == 0.0:
        raise BothCurrentsZero("rectification undefined when both currents vanish")
    return RectificationResult(
        forward_current=j_forward,
        reverse_current=j_reverse,
        factor=abs(j_forward + j_reverse) / scale,
    )


def quadrature_second_moments(
    P: np.ndarray, branches: tuple[BranchData, BranchData]
) -> tuple[float, float]:
    """Bare-mode ``<X^2>`` and ``<P^2>`` for a diagonal steady state."""
    ns = np.arange(P.shape[1], dtype=float)
    xx = 0.0
    pp = 0.0
    for branch in branches:
        weight = float(np.sum(P[branch.sigma] * (2.0 * ns + 1.0)))
        xx += (branch.f - branch.g) ** 2 * weight
        pp += (branch.f + branch.g) ** 2 * weight
    return xx, pp


def quadrature_variance(
    P: np.ndarray, branches: tuple[BranchData, BranchData], theta: float
) -> float:
    """Variance of the rotated quadrature ``X cos(theta) + P sin(theta)``.

    First moments and the symmetrised cross moment vanish for population
    states, so the variance is a pure two-term combination.
    """
    xx, pp = quadrature_second_moments(P, branches)
    return math.cos(theta) ** 2 * xx + math.sin(theta) ** 2 * pp


@dataclass(frozen=True)
class SqueezingResult:
    """Minimum quadrature variance, its angle, and the two principal variances."""

    xi_squared: float
    theta_star: float
    var_x: float
    var_p: float


def squeezing_factor(
    P: np.ndarray,
    branches: tuple[BranchData, BranchData],
    theta_grid_size: int = 64,
) -> SqueezingResult:
    """Minimise the quadrature variance over the rotation angle.

    Scans a uniform angle grid on ``[0, pi)`` and refines the best interval
    by golden-section search.  With a diagonal state the minimum always sits
    at angle 0 or pi/2; the scan-plus-refine stays correct for any variance
    profile and resolves the winning angle to ~1e-10 rad.
    """
    if theta_grid_size < 4:
        raise ValueError(f"theta grid needs at least 4 points, got {theta_grid_size}")
    xx, pp = quadrature_second_moments(P, branches)

    def variance(theta: float) -> float:
        return math.cos(theta) ** 2 * xx + math.sin(theta) ** 2 * pp

    grid = np.linspace(0.0, math.pi, theta_grid_size, endpoint=False)
    values = [variance(t) for t in grid]
    best = int(np.argmin(values))
    step = math.pi / theta_grid_size
    lo = grid[best] - step
    hi = grid[best] + step

    # Golden-section refinement on the bracketing interval.
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = variance(c), variance(d)
    while b - a > 1e-10:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = variance(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = variance(d)
    theta_star = math.fmod(0.5 * (a + b), math.pi)
    if theta_star < 0.0:
        theta_star += math.pi
    return SqueezingResult(
        xi_squared=variance(theta_star),
        theta_star=theta_star,
        var_x=xx,
        var_p=pp,
    )


@dataclass(frozen=True)
class WeakCouplingCurrent:
    """Leading-order current and its per-level cyclic components."""

    total: float
    components: list[tuple[int, float, float]]
    cutoff_m: int


def weak_coupling_current(
    params: SystemParams,
    bath_r: BathSpec,
    bath_q: BathSpec,
    m_cut: int | None = None,
) -> WeakCouplingCurrent:
    """Closed-form current at leading order in the coupling.

    Two cyclic-transition families contribute per resonator level ``m``: a
    qubit flip with two-photon emission against the upper-branch gap and one
    against the lower-branch gap.  The level sum decays geometrically with
    the resonator-bath Boltzmann factor and is cut off adaptively once the
    last term falls below ``1e-10`` of the running total.

    Parameters
    ----------
    m_cut : int, optional
        Fixed summation cutoff.  When given, the tail bound is checked at
        ``m_cut`` and :class:`CutoffUnconverged` raised if violated.
    """
    if params.coupling > 0.02:
        warnings.warn(
            f"weak-coupling expression used at coupling {params.coupling}; "
            "accuracy degrades beyond ~0.02",
            stacklevel=2,
        )
    if bath_r.T <= 0.0:
        raise ValueError("weak-coupling current needs a positive resonator-bath T")
    if params.epsilon <= 0.0:
        raise ValueError("weak-coupling current assumes a positive qubit splitting")
    if m_cut is not None and m_cut < 2:
        raise ValueError(f"summation cutoff must be at least 2, got {m_cut}")

    omega = params.omega_a
    eps = params.epsilon
    n_r2 = bose_occupation(2.0 * omega, bath_r.T)
    n_rw = bose_occupation(omega, bath_r.T)
    n_qe = bose_occupation(eps, bath_q.T)
    denom = (1.0 + 2.0 * n_qe) * (1.0 + n_rw) * n_r2

    gap_hi = 2.0 * omega + eps
    n_q_hi = bose_occupation(gap_hi, bath_q.T)
    kernel_hi = spectral_density(gap_hi, bath_q) * (
        (1.0 + n_q_hi) * n_qe * n_r2 - n_q_hi * (1.0 + n_qe) * (1.0 + n_r2)
    )

    gap_lo = 2.0 * omega - eps
    if gap_lo > 0.0:
        n_q_lo = bose_occupation(gap_lo, bath_q.T)
        kernel_lo = spectral_density(gap_lo, bath_q) * (
            (1.0 + n_q_lo) * (1.0 + n_qe) * n_r2 - n_q_lo * n_qe * (1.0 + n_r2)
        )
    else:
        kernel_lo = 0.0

    boltzmann = math.exp(-omega / bath_r.T)
    cap = m_cut if m_cut is not None else _M_CAP

    components: list[tuple[int, float, float]] = []
    total = 0.0
    weight = boltzmann**2
    converged = False
    m = 2
    while m <= cap:
        i_m1 = kernel_hi * weight / denom
        i_m0 = kernel_lo * weight / denom
        components.append((m, i_m1, i_m0))
        term = m * (m - 1) * (i_m1 + i_m0)
        total += term
        if abs(term) <= _TAIL_TOL * abs(total):
            converged = True
            if m_cut is None and m >= min(_M_MIN, cap):
                break
        elif m == cap:
            converged = False
        weight *= boltzmann
        m += 1
    if not converged:
        raise CutoffUnconverged(
            f"component sum tail above {_TAIL_TOL:g} of the total at m={cap}"
        )
    prefactor = 2.0 * params.coupling**2 / omega
    return WeakCouplingCurrent(
        total=prefactor * total,
        components=components,
        cutoff_m=components[-1][0],
    )


def detect_ndtc(curve) -> tuple[float, float] | None:
    """Locate an interior current maximum on a sampled bias curve.

    Raw neighbour comparison on the given samples, no smoothing or
    interpolation; returns ``None`` for monotone curves.

    Parameters
    ----------
    curve : sequence of (bias, current)
        Sampled on strictly increasing positive bias.

    Raises
    ------
    TooFewPoints
        For fewer than five samples.
    """
    points = list(curve)
    if len(points) < 5:
        raise TooFewPoints(f"need at least 5 samples, got {len(points)}")
    biases = np.array([p[0] for p in points])
    if np.any(np.diff(biases) <= 0):
        raise ValueError("bias values must be strictly increasing")
    currents = np.array([p[1] for p in points])
    k = int(np.argmax(currents))
    if 0 < k < len(points) - 1:
        if currents[k] > currents[k - 1] and currents[k] > currents[k + 1]:
            return float(biases[k]), float(currents[k])
    return None
