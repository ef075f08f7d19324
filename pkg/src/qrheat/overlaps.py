"""Overlap coefficients between squeezed Fock states of opposite branches.

The qubit-bath coupling connects the two branch eigenbases, so its transition
rates carry matrix elements of the relative squeeze operator
``exp[(d/2)(a^dag^2 - a^2)]`` with ``d`` the difference of the two branch
squeeze parameters.  The closed-form coefficient is a finite sum whose raw
form mixes fractional powers of quantities that can be negative.  Here the
summand is regrouped so that only integer powers of the hyperbolic functions
``u = cosh(d)`` and ``v = -sinh(d)`` appear, with explicit signs:

    G[m, m'] = sqrt(m! m'!) * u**-(S + 1/2)
               * sum_k (-1)**k (v/2)**(S - l) / (l! k! j!)

with ``S = (m + m')/2``, ``l = m - 2k``, ``j = k + (m' - m)/2`` and the sum
running over all ``k`` keeping ``l, j >= 0``.  The coefficient vanishes
identically for odd ``|m - m'|`` (photon-parity selection rule) and the
module returns an exact zero in that case.

Factorials are evaluated directly below ``DIRECT_LIMIT`` and in log domain
with sign tracking above it.  A dense matrix-exponential oracle
(:func:`brute_force_overlap`) referees both paths in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal, expm
from scipy.special import gammaln

from .errors import OverflowRisk, TruncationTooSmall
from .spectrum import BranchData

# Direct factorial products are exact and fast up to here; above, the log
# domain avoids float overflow of (m + m')!-scale factors.
DIRECT_LIMIT = 30
# Largest index accepted when the caller explicitly disables log-domain mode.
STABLE_WINDOW = 512


@dataclass(frozen=True)
class SqueezeMismatch:
    """Relative squeeze between a branch and its opposite.

    ``u = cosh(delta_alpha)`` and ``v = -sinh(delta_alpha)`` satisfy
    ``u**2 - v**2 = 1``.  For the upper branch ``delta_alpha`` is positive;
    building the mismatch of the lower branch flips its sign (and with it
    the sign of ``v``).
    """

    delta_alpha: float
    u: float
    v: float

    @classmethod
    def from_delta(cls, delta_alpha: float) -> "SqueezeMismatch":
        return cls(
            delta_alpha=delta_alpha,
            u=math.cosh(delta_alpha),
            v=-math.sinh(delta_alpha),
        )

    @classmethod
    def from_branches(
        cls, branches: tuple[BranchData, BranchData], sigma: int
    ) -> "SqueezeMismatch":
        """Mismatch seen from branch ``sigma`` relative to the opposite one."""
        return cls.from_delta(branches[sigma].alpha - branches[1 - sigma].alpha)


@dataclass(frozen=True)
class OverlapTable:
    """Dense matrix of overlap coefficients for one fixed branch.

    ``entries[m, m']`` holds the coefficient between level ``m`` of the
    table's branch and level ``m'`` of the opposite branch.  The table of
    the opposite branch equals the transpose (a property the test suite
    verifies against independently built tables rather than assuming).
    """

    size: int
    entries: np.ndarray
    delta_alpha: float
    sigma: int | None = None


def _direct_entry(m: int, m_prime: int, u: float, v: float) -> float:
    """Direct-product evaluation, valid for small indices only."""
    try:
        pre = math.sqrt(float(math.factorial(m)) * float(math.factorial(m_prime)))
    except OverflowError as exc:
        raise OverflowRisk(
            f"factorials overflow at (m, m') = ({m}, {m_prime}); "
            "use log-domain mode"
        ) from exc
    d = (m_prime - m) // 2
    s = (m + m_prime) // 2
    total = 0.0
    for k in range(max(0, -d), m // 2 + 1):
        l = m - 2 * k
        j = k + d
        term = (v / 2.0) ** (d + 2 * k) / (
            math.factorial(l) * math.factorial(k) * math.factorial(j)
        )
        total += -term if k % 2 else term
    return pre * u ** -(s + 0.5) * total


def _log_entry(m: int, m_prime: int, u: float, v: float) -> float:
    """Log-domain evaluation with sign tracking."""
    d = (m_prime - m) // 2
    s = (m + m_prime) // 2
    ks = np.arange(max(0, -d), m // 2 + 1)
    ls = m - 2 * ks
    js = ks + d
    log_abs = (
        (d + 2 * ks) * math.log(abs(v) / 2.0)
        - gammaln(ls + 1.0)
        - gammaln(ks + 1.0)
        - gammaln(js + 1.0)
    )
    signs = np.where(ks % 2 == 0, 1.0, -1.0)
    if v < 0 and d % 2:
        signs = -signs
    peak = log_abs.max()
    total = float(np.sum(signs * np.exp(log_abs - peak)))
    log_pre = (
        0.5 * (gammaln(m + 1.0) + gammaln(m_prime + 1.0))
        - (s + 0.5) * math.log(u)
        + peak
    )
    return math.exp(log_pre) * total


def overlap(
    m: int, m_prime: int, sq: SqueezeMismatch, log_domain: bool | None = None
) -> float:
    """Overlap coefficient between squeezed Fock levels of opposite branches.

    Parameters
    ----------
    m, m_prime : int
        Non-negative level indices; ``m`` belongs to the branch the mismatch
        was built for, ``m_prime`` to the opposite branch.
    sq : SqueezeMismatch
        Relative squeeze data.
    log_domain : bool, optional
        ``None`` (default) switches to log-domain evaluation above
        ``DIRECT_LIMIT``.  ``False`` forces direct products and raises
        :class:`OverflowRisk` beyond the stable window.

    Returns
    -------
    float
        Exactly ``0.0`` for odd ``|m - m'|`` (parity selection rule).
    """
    if m < 0 or m_prime < 0:
        raise ValueError(f"level indices must be non-negative, got ({m}, {m_prime})")
    if (m - m_prime) % 2:
        return 0.0
    if sq.v == 0.0:
        return 1.0 if m == m_prime else 0.0
    if log_domain is None:
        log_domain = max(m, m_prime) > DIRECT_LIMIT
    elif not log_domain and max(m, m_prime) > STABLE_WINDOW:
        raise OverflowRisk(
            f"(m, m') = ({m}, {m_prime}) exceeds the stable window "
            f"{STABLE_WINDOW} with log-domain mode disabled"
        )
    if log_domain:
        return _log_entry(m, m_prime, sq.u, sq.v)
    return _direct_entry(m, m_prime, sq.u, sq.v)


def _spectral_block(n_max: int, delta_alpha: float) -> np.ndarray:
    """Exponential of the squeeze generator on levels ``0..n_max``.

    The generator ``(d/2)(a^dag^2 - a^2)`` decouples the even and odd Fock
    sectors, and within each sector it is a real antisymmetric tridiagonal
    matrix.  A diagonal phase similarity maps it to ``i`` times a real
    symmetric tridiagonal matrix, whose eigendecomposition gives the
    exponential without any series cancellation.  The sector is padded with
    the same hard-wall margin the dense oracle uses.
    """
    size = n_max + 1
    n_dim = 4 * size + 100
    out = np.zeros((size, size))
    for start in (0, 1):
        bare = np.arange(start, n_dim, 2)
        couplings = 0.5 * delta_alpha * np.sqrt(
            (bare[:-1] + 1.0) * (bare[:-1] + 2.0)
        )
        theta, vec = eigh_tridiagonal(np.zeros(bare.size), couplings)
        kept = int(np.searchsorted(bare, n_max, side="right"))
        top = vec[:kept]
        block = (top * np.exp(1j * theta)) @ top.T
        positions = np.arange(kept)
        phase = 1j ** (positions[None, :] - positions[:, None])
        values = (phase * block).real
        out[np.ix_(bare[:kept], bare[:kept])] = values
    return out


def overlap_table(
    n_max: int, sq: SqueezeMismatch, sigma: int | None = None
) -> OverlapTable:
    """Batch-evaluate the full overlap matrix for levels ``0..n_max``.

    Built through the sector eigendecomposition of the squeeze generator,
    which one factorisation shares across all entries and which stays
    accurate where the closed-form sum loses digits to cancellation (large
    indices at strong coupling).  Agrees elementwise with :func:`overlap`
    inside the sum's stable range and with the dense oracle everywhere.
    """
    if n_max < 0:
        raise ValueError(f"table size must be non-negative, got {n_max}")
    size = n_max + 1
    if sq.v == 0.0:
        return OverlapTable(size, np.eye(size), sq.delta_alpha, sigma)
    return OverlapTable(
        size, _spectral_block(n_max, sq.delta_alpha), sq.delta_alpha, sigma
    )


@lru_cache(maxsize=8)
def _cached_table(delta_alpha: float, n_max: int, sigma: int) -> OverlapTable:
    return overlap_table(n_max, SqueezeMismatch.from_delta(delta_alpha), sigma)


def cached_overlap_table(
    branches: tuple[BranchData, BranchData], sigma: int, n_max: int
) -> OverlapTable:
    """Memoised table builder used by the sweep machinery.

    Rounds the requested size up to the next multiple of 50 so that
    truncation escalation reuses one table per coupling; the overshoot is
    exact because entries do not depend on the table size.
    """
    build_n = min(-(-(n_max + 1) // 50) * 50, 1024)
    delta = branches[sigma].alpha - branches[1 - sigma].alpha
    return _cached_table(delta, build_n, sigma)


def brute_force_overlap(
    m: int, m_prime: int, delta_alpha: float, n_bare: int
) -> float:
    """Oracle: dense matrix exponential of the squeeze generator.

    Exponentiates ``(delta_alpha / 2)(a^dag^2 - a^2)`` on a hard-wall Fock
    space and reads off the ``(m, m')`` element.  Converges to
    :func:`overlap` as ``n_bare`` grows.
    """
    required = 4 * max(m, m_prime) + 100
    if n_bare < required:
        raise TruncationTooSmall(
            f"n_bare={n_bare} below the reliable minimum {required} "
            f"for (m, m') = ({m}, {m_prime})"
        )
    ns = np.arange(n_bare, dtype=float)
    gen = np.zeros((n_bare, n_bare))
    amp = 0.5 * delta_alpha * np.sqrt(ns[1:-1] * (ns[1:-1] + 1.0))
    rows = np.arange(2, n_bare)
    gen[rows, rows - 2] = amp
    gen[rows - 2, rows] = -amp
    return float(expm(gen)[m, m_prime])
