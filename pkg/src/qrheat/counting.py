"""Counting-field-tilted population dynamics and heat-current cumulants.

The populations of the dressed states form a classical Markov jump process.
Attaching a counting field to the energy exchanged with a bath multiplies
every jump entry by ``exp(-u * dE)`` for absorption from that bath and
``exp(+u * dE)`` for emission into it, where ``u`` is the counting variable
rotated to the real axis so the tilted matrix stays real with a real Perron
root.  The scaled cumulant generating function is the dominant eigenvalue of
the tilted generator; its derivatives at zero tilt give the steady-state
heat current, noise power, and skewness into the counted bath.  Positive
current means energy flowing into the qubit-side bath.

Two independent extraction routes are provided: central finite differences
in the tilt with Richardson extrapolation, and exact eigenvalue perturbation
through the reduced resolvent of the untilted generator.  They agree to
first order with the population-weighted current sum, which the test suite
enforces three ways.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .baths import RateSet
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    SingularSolve,
    StepTooLarge,
)

# Largest safe tilt exponent for the finite-difference evaluations.
_FD_EXP_CAP = math.log(1e3)
# Stationarity residual bound (max-norm, in generator units).
_RESIDUAL_TOL = 1e-12
# Allowed negative undershoot of populations before the solve is rejected.
_NEGATIVE_TOL = 1e-12


@dataclass(frozen=True)
class TiltedGenerator:
    """Population rate matrix dressed with real-rotated counting fields.

    ``matrix[i, j]`` is the rate from state ``j`` into state ``i`` with
    states ordered ``(sigma, n) -> sigma * (N + 1) + n``.  At zero tilt
    every column sums to zero; the diagonal always holds the untilted
    outflow, so only off-diagonal entries carry tilt factors.
    """

    n_max: int
    matrix: np.ndarray
    tilt_r: float
    tilt_q: float


@dataclass(frozen=True)
class CumulantResult:
    """First three steady-state cumulants of the counted heat."""

    current: float
    noise: float
    skewness: float
    method: str
    truncation_n: int


def build_generator(
    rates: RateSet, energies: np.ndarray, u_r: float = 0.0, u_q: float = 0.0
) -> TiltedGenerator:
    """Assemble the (possibly tilted) population generator.

    Raises
    ------
    DimensionMismatch
        If the energy table truncation differs from the rate tables.
    """
    n_max = rates.n_max
    size = n_max + 1
    if energies.shape != (2, size):
        raise DimensionMismatch(
            f"energies shape {energies.shape} incompatible with N={n_max}"
        )
    dim = 2 * size
    tilted = np.zeros((dim, dim))
    untilted = np.zeros((dim, dim))

    rows = np.arange(1, size)
    for sigma in (0, 1):
        base = sigma * size
        obase = (1 - sigma) * size
        quantum = rates.ladders[sigma]
        up = rates.resonator_up[sigma]
        down = rates.resonator_down[sigma]
        tilted[base + rows, base + rows - 1] += up[1:] * math.exp(-u_r * quantum)
        tilted[base + rows - 1, base + rows] += down[1:] * math.exp(u_r * quantum)
        untilted[base + rows, base + rows - 1] += up[1:]
        untilted[base + rows - 1, base + rows] += down[1:]

        q_up = rates.qubit_up[sigma]
        q_down = rates.qubit_down[sigma]
        active = q_down > 0.0
        gap = np.where(active, rates.gaps[sigma], 0.0)
        tilted[base : base + size, obase : obase + size] += q_up * np.exp(-u_q * gap)
        tilted[obase : obase + size, base : base + size] += (
            q_down * np.exp(u_q * gap)
        ).T
        untilted[base : base + size, obase : obase + size] += q_up
        untilted[obase : obase + size, base : base + size] += q_down.T

    tilted[np.diag_indices(dim)] -= untilted.sum(axis=0)
    return TiltedGenerator(n_max=n_max, matrix=tilted, tilt_r=u_r, tilt_q=u_q)


def _tilt_derivative(rates: RateSet, order: int) -> np.ndarray:
    """Elementwise derivative of the generator w.r.t. the qubit-bath tilt.

    Absorption entries carry ``(-dE)**order`` and emission entries
    ``(+dE)**order``; the untilted diagonal drops out.
    """
    size = rates.n_max + 1
    dim = 2 * size
    out = np.zeros((dim, dim))
    for sigma in (0, 1):
        base = sigma * size
        obase = (1 - sigma) * size
        gap = rates.gaps[sigma]
        out[base : base + size, obase : obase + size] += rates.qubit_up[sigma] * (
            -gap
        ) ** order
        out[obase : obase + size, base : base + size] += (
            rates.qubit_down[sigma] * gap**order
        ).T
    return out


def _bordered_factorisation(matrix: np.ndarray):
    """LU factorisation of the generator with the last row replaced by ones.

    The replaced row pins the normalisation (for the stationary solve) or
    the complement constraint (for resolvent solves); consistency of the
    dropped balance row is guaranteed by zero column sums.
    """
    bordered = matrix.copy()
    bordered[-1, :] = 1.0
    try:
        factors = lu_factor(bordered)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise SingularSolve("generator factorisation failed") from exc
    return bordered, factors


def _refined_solve(bordered, factors, rhs: np.ndarray) -> np.ndarray:
    """LU solve with two steps of iterative refinement."""
    x = lu_solve(factors, rhs)
    for _ in range(2):
        residual = rhs - bordered @ x
        x = x + lu_solve(factors, residual)
    if not np.all(np.isfinite(x)):
        raise SingularSolve("bordered solve produced non-finite entries")
    return x


def steady_state(gen: TiltedGenerator) -> np.ndarray:
    """Stationary population vector of the untilted generator.

    Returns
    -------
    ndarray of shape (2, N + 1)
        Normalised populations indexed by (branch, level).

    Raises
    ------
    SingularSolve
        If the null space is not one-dimensional (disconnected chain) or
        the solution carries negative weight beyond tolerance.
    """
    if gen.tilt_r != 0.0 or gen.tilt_q != 0.0:
        raise ValueError("steady state is defined at zero tilt only")
    matrix = gen.matrix
    dim = matrix.shape[0]
    rhs = np.zeros(dim)
    rhs[-1] = 1.0
    bordered, factors = _bordered_factorisation(matrix)
    pops = _refined_solve(bordered, factors, rhs)

    tol = _RESIDUAL_TOL * max(1.0, float(np.abs(matrix).max()))
    residual = float(np.abs(matrix @ pops).max())
    if not math.isfinite(residual) or residual > tol:
        raise SingularSolve(
            f"stationary residual {residual:.3e} exceeds {tol:.3e}; "
            "null space is likely degenerate"
        )
    if float(pops.min()) < -_NEGATIVE_TOL:
        raise SingularSolve(
            f"stationary vector has negative weight {pops.min():.3e}"
        )
    pops = np.clip(pops, 0.0, None)
    pops /= pops.sum()
    return pops.reshape(2, gen.n_max + 1)


def stationary_residual(gen: TiltedGenerator, pops: np.ndarray) -> float:
    """Max-norm of the stationarity defect for a population vector."""
    return float(np.abs(gen.matrix @ pops.ravel()).max())


def dominant_eigenvalue(gen: TiltedGenerator) -> float:
    """Algebraically largest real eigenvalue (Perron root) of the tilted matrix.

    Equals the scaled cumulant generating function at the generator's tilts;
    zero at zero tilt.
    """
    try:
        values = np.linalg.eigvals(gen.matrix)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure("eigenvalue iteration failed") from exc
    return float(values.real.max())


def direct_current(P: np.ndarray, rates: RateSet, energies: np.ndarray) -> float:
    """Energy-weighted net emission into the qubit-side bath.

    Each downward jump deposits its gap energy into the bath, each upward
    jump withdraws it; the result equals the first tilt derivative of the
    cumulant generating function.
    """
    if P.shape != (2, rates.n_max + 1):
        raise DimensionMismatch(
            f"population shape {P.shape} incompatible with N={rates.n_max}"
        )
    total = 0.0
    for sigma in (0, 1):
        gap = rates.gaps[sigma]
        down = rates.qubit_down[sigma] * P[sigma][:, None]
        up = rates.qubit_up[sigma] * P[1 - sigma][None, :]
        total += float(np.sum(gap * (down - up)))
    return total


def transport_scales(P: np.ndarray, rates: RateSet) -> tuple[float, float, float]:
    """Gross (non-cancelling) energy-exchange scales of orders 1..3.

    These set the floating-point noise floor of the corresponding cumulants
    and are used by the truncation-convergence certificates.
    """
    scales = [0.0, 0.0, 0.0]
    for sigma in (0, 1):
        gap = np.abs(rates.gaps[sigma])
        gross = rates.qubit_down[sigma] * P[sigma][:, None] + rates.qubit_up[
            sigma
        ] * P[1 - sigma][None, :]
        for k in range(3):
            scales[k] += float(np.sum(gap ** (k + 1) * gross))
    return scales[0], scales[1], scales[2]


def _max_gap(rates: RateSet) -> float:
    positive = rates.gaps[rates.qubit_down > 0.0]
    gap_max = float(positive.max()) if positive.size else 0.0
    return max(gap_max, float(rates.ladders.max()))


def cumulants_fd(
    rates: RateSet, energies: np.ndarray, step: float = 1e-3
) -> CumulantResult:
    """Cumulants from central differences of the dominant eigenvalue.

    Uses two step sizes (ratio 2) combined by Richardson extrapolation, so
    the leading error is fourth order in ``step``.

    Raises
    ------
    StepTooLarge
        If the widest evaluation would exponentiate a tilt factor beyond
        ``exp(step_max * dE_max) = 1e3``.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    gap_max = _max_gap(rates)
    if 2.0 * step * gap_max > _FD_EXP_CAP:
        raise StepTooLarge(
            f"2*step*dE_max = {2.0 * step * gap_max:.3f} exceeds "
            f"ln(1e3) = {_FD_EXP_CAP:.3f}; reduce the step"
        )

    def cgf(u: float) -> float:
        return dominant_eigenvalue(build_generator(rates, energies, 0.0, u))

    h = step
    g0 = cgf(0.0)
    g_p2, g_p1, g_ph = cgf(2 * h), cgf(h), cgf(h / 2)
    g_m2, g_m1, g_mh = cgf(-2 * h), cgf(-h), cgf(-h / 2)

    d1_h = (g_p1 - g_m1) / (2 * h)
    d1_h2 = (g_ph - g_mh) / h
    d2_h = (g_p1 - 2 * g0 + g_m1) / h**2
    d2_h2 = (g_ph - 2 * g0 + g_mh) / (h / 2) ** 2
    d3_h = (g_p2 - 2 * g_p1 + 2 * g_m1 - g_m2) / (2 * h**3)
    d3_h2 = (g_p1 - 2 * g_ph + 2 * g_mh - g_m1) / (2 * (h / 2) ** 3)

    return CumulantResult(
        current=(4 * d1_h2 - d1_h) / 3,
        noise=(4 * d2_h2 - d2_h) / 3,
        skewness=(4 * d3_h2 - d3_h) / 3,
        method="finite_difference",
        truncation_n=rates.n_max,
    )


def cumulants_perturbative(rates: RateSet, energies: np.ndarray) -> CumulantResult:
    """Cumulants from exact eigenvalue perturbation of the tilted generator.

    Expands the Perron eigenvalue to third order in the tilt and solves the
    correction equations on the complement of the stationary direction, so
    there is no step-size error.  The first cumulant reproduces
    :func:`direct_current` to rounding accuracy.
    """
    gen = build_generator(rates, energies)
    matrix = gen.matrix
    dim = matrix.shape[0]
    m1 = _tilt_derivative(rates, 1)
    m2 = _tilt_derivative(rates, 2)
    m3 = _tilt_derivative(rates, 3)

    bordered, factors = _bordered_factorisation(matrix)
    rhs = np.zeros(dim)
    rhs[-1] = 1.0
    pops = _refined_solve(bordered, factors, rhs)

    def complement_solve(residual: np.ndarray) -> np.ndarray:
        rhs_c = residual.copy()
        rhs_c[-1] = 0.0
        return _refined_solve(bordered, factors, rhs_c)

    m1_p = m1 @ pops
    g1 = float(m1_p.sum())
    x1 = complement_solve(g1 * pops - m1_p)

    m1_x1 = m1 @ x1
    m2_p = m2 @ pops
    g2 = float(m1_x1.sum() + 0.5 * m2_p.sum())
    x2 = complement_solve(g1 * x1 + g2 * pops - m1_x1 - 0.5 * m2_p)

    g3 = float((m1 @ x2).sum() + 0.5 * (m2 @ x1).sum() + (m3 @ pops).sum() / 6.0)

    return CumulantResult(
        current=g1,
        noise=2.0 * g2,
        skewness=6.0 * g3,
        method="perturbative",
        truncation_n=rates.n_max,
    )
