"""Exact spectrum of the quadratically coupled qubit-resonator Hamiltonian.

The system is a single bosonic mode of frequency ``omega_a`` coupled to a
two-level system (splitting ``epsilon``) through a term proportional to
``sigma_z (a^dag + a)^2``.  Because the coupling commutes with ``sigma_z``,
the Hamiltonian splits into two bosonic branches labelled ``sigma in {0, 1}``
(qubit down / up), each of which is a quadratic form diagonalised by a
Bogoliubov (squeezing) transformation.  This module computes the per-branch
squeezed-mode data and the exact eigenvalues, and carries a dense
diagonalisation oracle used by the test suite.

Conventions: hbar = k_B = 1, all energies in units of ``omega_a`` unless the
caller chooses otherwise.  Everything here is an immutable value type or a
pure function, safe to share across worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CouplingOutOfRange, NonPositiveFrequency, TruncationTooSmall

# Relative safety margin below the spectral-collapse bound omega_a / 4.  The
# Bogoliubov coefficients diverge as the bound is approached, so couplings in
# the last 1e-6 sliver are rejected outright.
COUPLING_MARGIN = 1e-6


def _branch_sign(sigma: int) -> float:
    """Sign carried by branch ``sigma``: +1 for the upper branch, -1 for the lower."""
    if sigma not in (0, 1):
        raise ValueError(f"branch label must be 0 or 1, got {sigma}")
    return 1.0 if sigma == 1 else -1.0


@dataclass(frozen=True)
class SystemParams:
    """Bare model parameters: resonator frequency, qubit splitting, coupling."""

    omega_a: float = 1.0
    epsilon: float = 1.0
    coupling: float = 0.0


def validate_params(params: SystemParams) -> SystemParams:
    """Check the model invariants and return the validated parameters.

    Raises
    ------
    NonPositiveFrequency
        If the resonator frequency is not positive.
    CouplingOutOfRange
        If the coupling is negative or not safely below ``omega_a / 4``,
        where the lower-branch mode softens to zero frequency.
    """
    if params.omega_a <= 0:
        raise NonPositiveFrequency(
            f"resonator frequency must be positive, got {params.omega_a}"
        )
    bound = 0.25 * params.omega_a - COUPLING_MARGIN * params.omega_a
    if params.coupling < 0 or params.coupling > bound:
        raise CouplingOutOfRange(
            f"coupling must satisfy 0 <= coupling <= {bound!r} "
            f"(omega_a/4 with margin), got {params.coupling}"
        )
    return params


@dataclass(frozen=True)
class BranchData:
    """Squeezed-mode data for one qubit branch.

    ``f`` and ``g`` are the Bogoliubov coefficients of the new mode
    ``A = f a + g a^dag`` with ``f**2 - g**2 = 1``; ``alpha`` is the squeeze
    parameter of the transformation that diagonalises the branch and
    ``phi = -g / f`` the squeezed-vacuum amplitude ratio.  ``eta * omega``
    is the ladder spacing of the branch.
    """

    sigma: int
    eta: float
    omega: float
    f: float
    g: float
    alpha: float
    phi: float
    epsilon_signed: float
    coupling_signed: float

    @property
    def ladder(self) -> float:
        """Level spacing of the squeezed mode."""
        return self.eta * self.omega


def build_branch(params: SystemParams, sigma: int) -> BranchData:
    """Construct the squeezed-mode data of branch ``sigma`` (validated params)."""
    sign = _branch_sign(sigma)
    lam_s = sign * params.coupling
    eps_s = sign * params.epsilon
    omega_s = params.omega_a + 2.0 * lam_s
    ratio = 2.0 * params.coupling / omega_s
    eta = math.sqrt(1.0 - ratio * ratio)
    f = math.sqrt((1.0 + eta) / (2.0 * eta))
    g = sign * math.sqrt((1.0 - eta) / (2.0 * eta))
    alpha = math.atanh(sign * math.sqrt((1.0 - eta) / (1.0 + eta)))
    return BranchData(
        sigma=sigma,
        eta=eta,
        omega=omega_s,
        f=f,
        g=g,
        alpha=alpha,
        phi=-g / f,
        epsilon_signed=eps_s,
        coupling_signed=lam_s,
    )


def build_branches(params: SystemParams) -> tuple[BranchData, BranchData]:
    """Both branches, indexed by their label."""
    return build_branch(params, 0), build_branch(params, 1)


def _branch_offset(branch: BranchData) -> float:
    # Zero-point term of the diagonalised branch oscillator plus the scalar
    # part of the decomposition.  The displaced frequency (not the bare one)
    # enters the zero-point shift; the dense-diagonalisation oracle pins this.
    return (
        (branch.eta - 1.0) * branch.omega / 2.0
        + branch.epsilon_signed / 2.0
        + branch.coupling_signed
    )


def eigen_energy(params: SystemParams, branch: BranchData, n: int) -> float:
    """Exact eigenvalue of level ``n`` in the given branch.

    The ladder is exactly linear: consecutive levels differ by
    ``branch.eta * branch.omega``.
    """
    if n < 0:
        raise ValueError(f"occupation must be non-negative, got {n}")
    return branch.eta * branch.omega * n + _branch_offset(branch)


def energy_levels(
    params: SystemParams, branches: tuple[BranchData, BranchData], n_max: int
) -> np.ndarray:
    """Eigenvalues for both branches as an array of shape (2, n_max + 1)."""
    levels = np.empty((2, n_max + 1))
    ns = np.arange(n_max + 1, dtype=float)
    for branch in branches:
        levels[branch.sigma] = (
            branch.eta * branch.omega * ns + _branch_offset(branch)
        )
    return levels


def bare_block(params: SystemParams, sigma: int, n_bare: int) -> np.ndarray:
    """Dense bare-Fock-space Hamiltonian of one qubit branch.

    Used by the diagonalisation oracle and by tests that need eigenvectors
    in the bare basis (e.g. quadrature moments of the true ground state).
    """
    sign = _branch_sign(sigma)
    ns = np.arange(n_bare, dtype=float)
    x = np.zeros((n_bare, n_bare))
    root = np.sqrt(ns[1:])
    x[np.arange(n_bare - 1), np.arange(1, n_bare)] = root
    x[np.arange(1, n_bare), np.arange(n_bare - 1)] = root
    ham = np.diag(params.omega_a * ns + sign * params.epsilon / 2.0)
    ham += sign * params.coupling * (x @ x)
    return ham


def brute_force_spectrum(
    params: SystemParams, n_bare: int, n_levels: int | None = None
):
    """Oracle: diagonalise the Hamiltonian in a hard-wall bare Fock basis.

    The top 20% of each branch's eigenvalues is discarded because the
    hard-wall truncation distorts the high end of the spectrum.

    Parameters
    ----------
    params : SystemParams
        Validated model parameters.
    n_bare : int
        Bare Fock-space dimension per branch.  Low-lying levels converge to
        the analytic values as ``n_bare`` grows.
    n_levels : int, optional
        Number of lowest merged levels to return.  Defaults to the full
        reliable window.

    Returns
    -------
    list of (energy, sigma, occupation)
        Sorted ascending by energy.  ``occupation`` is the level index
        within its branch.

    Raises
    ------
    TruncationTooSmall
        If ``n_levels`` exceeds the reliable window.
    """
    keep = int(0.8 * n_bare)
    reliable = 2 * keep
    if n_levels is None:
        n_levels = reliable
    if n_levels > reliable:
        raise TruncationTooSmall(
            f"requested {n_levels} levels but only {reliable} are reliable "
            f"at n_bare={n_bare}"
        )
    merged = []
    for sigma in (0, 1):
        values = np.linalg.eigvalsh(bare_block(params, sigma, n_bare))
        merged.extend((float(e), sigma, n) for n, e in enumerate(values[:keep]))
    merged.sort(key=lambda item: item[0])
    return merged[:n_levels]
