"""Super-Ohmic bath spectra, thermal occupations, and dressed transition rates.

Two independent bosonic baths drive the system: bath ``R`` couples to the
resonator displacement and induces ladder transitions within each branch,
bath ``Q`` couples to the qubit flip operator and induces transitions
between opposite branches, weighted by the squeezed-state overlap
coefficients.  All rates obey local detailed balance at the temperature of
the bath that drives them, and ``T = 0`` is handled exactly (occupation
zero, no divisions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonPositiveFrequency
from .overlaps import OverlapTable
from .spectrum import BranchData

# Exponent beyond which the Bose factor underflows to zero anyway; guards
# math.expm1 against OverflowError.
_EXP_CAP = 700.0


@dataclass(frozen=True)
class BathSpec:
    """One thermal bath: label, dimensionless coupling, cutoff, temperature."""

    label: str
    alpha: float
    omega_c: float
    T: float

    def __post_init__(self):
        if self.label not in ("R", "Q"):
            raise ValueError(f"bath label must be 'R' or 'Q', got {self.label!r}")
        if self.alpha < 0:
            raise ValueError(f"bath coupling must be non-negative, got {self.alpha}")
        if self.omega_c <= 0:
            raise ValueError(f"cutoff frequency must be positive, got {self.omega_c}")
        if self.T < 0:
            raise ValueError(f"temperature must be non-negative, got {self.T}")


def spectral_density(omega: float, bath: BathSpec) -> float:
    """Super-Ohmic spectral density, zero at and below zero frequency."""
    if omega <= 0.0:
        return 0.0
    return (
        math.pi
        * bath.alpha
        * omega**3
        / bath.omega_c**2
        * math.exp(-omega / bath.omega_c)
    )


def bose_occupation(omega: float, T: float) -> float:
    """Bose-Einstein occupation, exact at ``T = 0`` and stable for small
    ``omega / T`` (evaluated through expm1)."""
    if omega <= 0.0:
        raise NonPositiveFrequency(
            f"occupation needs a positive frequency, got {omega}"
        )
    if T == 0.0:
        return 0.0
    x = omega / T
    if x > _EXP_CAP:
        return 0.0
    return 1.0 / math.expm1(x)


def _bose_array(omega: np.ndarray, T: float) -> np.ndarray:
    """Vectorised occupation for strictly positive frequencies."""
    if T == 0.0:
        return np.zeros_like(omega)
    x = omega / T
    out = np.zeros_like(omega)
    small = x <= _EXP_CAP
    out[small] = 1.0 / np.expm1(x[small])
    return out


def _gamma_array(omega: np.ndarray, bath: BathSpec) -> np.ndarray:
    """Vectorised spectral density; zero wherever ``omega <= 0``."""
    om = np.where(omega > 0.0, omega, 0.0)
    return math.pi * bath.alpha * om**3 / bath.omega_c**2 * np.exp(-om / bath.omega_c)


def resonator_rates(
    branch: BranchData, m: int, bath: BathSpec
) -> tuple[float, float]:
    """Ladder rates (up, down) for level ``m`` of one branch.

    The up rate excites ``m-1 -> m`` by absorbing one squeezed-mode quantum
    from the resonator bath; the down rate is the reverse emission.  Both
    vanish at ``m = 0``.
    """
    if bath.label != "R":
        raise ValueError(f"resonator rates need the R bath, got {bath.label!r}")
    if m < 0:
        raise ValueError(f"level index must be non-negative, got {m}")
    if m == 0:
        return 0.0, 0.0
    quantum = branch.ladder
    weight = m * (branch.f - branch.g) ** 2 * spectral_density(quantum, bath)
    occ = bose_occupation(quantum, bath.T)
    return weight * occ, weight * (1.0 + occ)


def qubit_rates(
    m: int,
    m_prime: int,
    sigma: int,
    bath: BathSpec,
    table: OverlapTable,
    energies: np.ndarray,
) -> tuple[float, float]:
    """Qubit-bath rates (up, down) for the pair ``(m, sigma) <-> (m', sigma-bar)``.

    Nonzero only when the energy gap measured from ``(m, sigma)`` down to
    ``(m', sigma-bar)`` is positive and ``|m - m'|`` is even.  The prefactor
    is the product of the two opposite-branch overlap coefficients, which
    equals the squared table entry.
    """
    if bath.label != "Q":
        raise ValueError(f"qubit rates need the Q bath, got {bath.label!r}")
    if (m - m_prime) % 2:
        return 0.0, 0.0
    gap = float(energies[sigma, m] - energies[1 - sigma, m_prime])
    if gap <= 0.0:
        return 0.0, 0.0
    if table.sigma is not None and table.sigma != sigma:
        g_value = table.entries[m_prime, m]
    else:
        g_value = table.entries[m, m_prime]
    weight = g_value**2 * spectral_density(gap, bath)
    occ = bose_occupation(gap, bath.T)
    return weight * occ, weight * (1.0 + occ)


@dataclass(frozen=True)
class RateSet:
    """All dressed transition rates at one parameter point.

    ``resonator_up[sigma, m]`` drives ``(sigma, m-1) -> (sigma, m)`` and
    ``resonator_down[sigma, m]`` the reverse.  ``qubit_up[sigma, m, m']``
    drives ``(sigma-bar, m') -> (sigma, m)`` across the positive gap
    ``gaps[sigma, m, m']`` and ``qubit_down`` the reverse.  Rates are
    precomputed once per parameter point; solvers only read them.
    """

    n_max: int
    resonator_up: np.ndarray
    resonator_down: np.ndarray
    qubit_up: np.ndarray
    qubit_down: np.ndarray
    gaps: np.ndarray
    ladders: np.ndarray


def build_rate_set(
    branches: tuple[BranchData, BranchData],
    energies: np.ndarray,
    bath_r: BathSpec,
    bath_q: BathSpec,
    table: OverlapTable,
) -> RateSet:
    """Assemble the full rate tables for a truncation set by ``energies``.

    ``table`` may be larger than needed (it is sliced); it must be tagged
    with the branch it was built for.
    """
    n_max = energies.shape[1] - 1
    if table.size < n_max + 1:
        raise DimensionMismatch(
            f"overlap table of size {table.size} too small for N={n_max}"
        )
    if table.sigma is None:
        raise ValueError("rate assembly needs a branch-tagged overlap table")

    size = n_max + 1
    res_up = np.zeros((2, size))
    res_dn = np.zeros((2, size))
    q_up = np.zeros((2, size, size))
    q_dn = np.zeros((2, size, size))
    gaps = np.zeros((2, size, size))
    ladders = np.zeros(2)

    ms = np.arange(size, dtype=float)
    parity = (np.add.outer(np.arange(size), np.arange(size)) % 2) == 0
    g_table = table.entries[:size, :size]

    for branch in branches:
        sigma = branch.sigma
        quantum = branch.ladder
        ladders[sigma] = quantum
        weight = ms * (branch.f - branch.g) ** 2 * spectral_density(quantum, bath_r)
        occ = bose_occupation(quantum, bath_r.T)
        res_up[sigma] = weight * occ
        res_dn[sigma] = weight * (1.0 + occ)

        gap = energies[sigma][:, None] - energies[1 - sigma][None, :]
        gaps[sigma] = gap
        mask = parity & (gap > 0.0)
        g_sq = (g_table if sigma == table.sigma else g_table.T) ** 2
        safe_gap = np.where(mask, gap, 1.0)
        weight_q = np.where(mask, g_sq * _gamma_array(safe_gap, bath_q), 0.0)
        occ_q = _bose_array(safe_gap, bath_q.T)
        q_up[sigma] = weight_q * occ_q
        q_dn[sigma] = weight_q * (1.0 + occ_q)

    return RateSet(
        n_max=n_max,
        resonator_up=res_up,
        resonator_down=res_dn,
        qubit_up=q_up,
        qubit_down=q_dn,
        gaps=gaps,
        ladders=ladders,
    )
