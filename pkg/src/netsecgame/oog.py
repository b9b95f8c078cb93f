"""Output-to-output gain of a single attack/monitor pair.

For SISO channels with no unstable monitor zeros the worst-case stealthy
impact equals ``sup_w N_t(w) / N_m(w)`` where ``N_P(w) = |P(j omega)|**2`` and
``w = omega**2``.  The supremum of that rational function is found exactly
from its critical points, the value at ``w = 0`` and the limit ``w -> inf``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graph import Graph
from .lti import AttackScenario
from .polynomial import CLUSTER_TOL, Polynomial, cluster_roots

logger = logging.getLogger(__name__)

CRIT_IMAG_TOL = 1e-7
CRIT_REAL_TOL = 1e-9
UNSTABLE_ZERO_TOL = 1e-7


class SpectralPolynomial(Polynomial):
    """Polynomial in ``w = omega**2`` equal to ``|P(j omega)|**2``."""

    __slots__ = ()


class Feasibility(str, enum.Enum):
    RELATIVE_DEGREE = "relative-degree-violation"
    IMAGINARY_AXIS_ZERO = "imaginary-axis-monitor-zero"
    UNSTABLE_ZERO = "unstable-monitor-zero"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class GainResult:
    value: float
    omega_star: float | None
    reason: Feasibility
    delta: float = 1.0

    @property
    def bounded(self) -> bool:
        return self.reason is Feasibility.BOUNDED

    def scaled(self, delta: float) -> GainResult:
        """Same attack, alarm threshold ``delta`` instead of the current one."""
        if not delta > 0:
            raise ValueError("alarm threshold must be positive")
        return GainResult(self.value * delta / self.delta, self.omega_star, self.reason, delta)

    def to_record(self, attack: int | None = None, monitor: int | None = None) -> dict:
        if self.omega_star is None:
            omega = "none"
        elif math.isinf(self.omega_star):
            omega = "infinity"
        else:
            omega = self.omega_star
        rec = {
            "value": "inf" if math.isinf(self.value) else self.value,
            "omega_star": omega,
            "reason": self.reason.value,
        }
        if attack is not None:
            rec = {"a": attack, "m": monitor, **rec}
        return rec


def magnitude_squared(p: Polynomial) -> SpectralPolynomial:
    """``N(w)`` with ``N(omega**2) = P(j omega) P(-j omega)``.

    Splitting ``P(s) = E(s**2) + s O(s**2)`` gives
    ``N(w) = E(-w)**2 + w O(-w)**2``.
    """
    if p.is_zero():
        raise ValueError("magnitude of the zero polynomial")
    even = Polynomial(p.coeffs[0::2]).substitute_scale(-1)
    odd = Polynomial(p.coeffs[1::2]).substitute_scale(-1)
    n = even * even + Polynomial((0, 1)) * odd * odd
    return SpectralPolynomial(n.coeffs)


def output_to_output_gain(scenario: AttackScenario, delta: float = 1.0) -> GainResult:
    res = spectral_gain(scenario.numerator_target, scenario.numerator_monitor)
    return res if delta == 1.0 else res.scaled(delta)


def spectral_gain(p_target: Polynomial, p_monitor: Polynomial) -> GainResult:
    """Supremum over frequency of ``|P_t(j omega) / P_m(j omega)|**2``."""
    unstable = _unmatched_unstable_zeros(p_target, p_monitor)
    nt = magnitude_squared(p_target)
    nm = magnitude_squared(p_monitor)
    if nt.degree > nm.degree:
        return GainResult(math.inf, math.inf, Feasibility.RELATIVE_DEGREE)
    if nt.is_exact and nm.is_exact:
        g = nt.gcd(nm)
        nt, nm = nt.exact_div(g), nm.exact_div(g)
        if nm(0) == 0 or nm.sturm_count(0) > 0:
            logger.warning("monitor numerator %s has an imaginary-axis zero", p_monitor)
            return GainResult(math.inf, _axis_frequency(nm), Feasibility.IMAGINARY_AXIS_ZERO)
    else:
        w0 = _unmatched_axis_root(nt, nm)
        if w0 is not None:
            logger.warning("monitor numerator %s has an imaginary-axis zero", p_monitor)
            return GainResult(math.inf, math.sqrt(w0), Feasibility.IMAGINARY_AXIS_ZERO)
    if unstable:
        logger.warning("monitor numerator %s has unmatched unstable zeros %s", p_monitor, unstable)
        return GainResult(math.inf, None, Feasibility.UNSTABLE_ZERO)
    return _rational_sup(nt, nm)


def _rational_sup(nt: Polynomial, nm: Polynomial) -> GainResult:
    ntf, nmf = nt.to_float(), nm.to_float()

    def ratio(w: float) -> float:
        return float(ntf(w)) / float(nmf(w))

    # (w, value); the exact candidates keep rational precision until the end
    at_zero = Fraction(nt(0)) / nm(0) if nt.is_exact else nt(0) / nm(0)
    cands = [(0.0, float(at_zero))]
    crit = nt.derivative() * nm - nt * nm.derivative()
    if not crit.is_zero() and crit.degree >= 1:
        base = crit.squarefree_part() if crit.is_exact else crit
        for z in base.roots():
            if abs(z.imag) <= CRIT_IMAG_TOL * max(1.0, abs(z)) and z.real >= -CRIT_REAL_TOL:
                w = _polish_real(base.to_float(), max(z.real, 0.0))
                if float(nmf(w)) > 0:
                    cands.append((w, ratio(w)))
    if nt.degree == nm.degree:
        limit = float(nt.leading / nm.leading) if nt.is_exact else nt.leading / nm.leading
    else:
        limit = 0.0
    best_w, best = max(cands, key=lambda c: (c[1], -c[0]))
    if limit > best * (1 + 1e-12):
        return GainResult(limit, math.inf, Feasibility.BOUNDED)
    return GainResult(best, math.sqrt(best_w), Feasibility.BOUNDED)


def _polish_real(p: Polynomial, w: float, steps: int = 4) -> float:
    dp = p.derivative()
    for _ in range(steps):
        d = float(dp(w))
        if d == 0:
            break
        nxt = w - float(p(w)) / d
        if not math.isfinite(nxt) or nxt < 0 or abs(p(nxt)) >= abs(p(w)):
            break
        w = nxt
    return w


def _axis_frequency(nm: Polynomial) -> float | None:
    for z, _ in nm.roots_with_multiplicity():
        if abs(z.imag) <= CRIT_IMAG_TOL and z.real >= -CRIT_REAL_TOL:
            return math.sqrt(max(z.real, 0.0))
    return None


def _unmatched_axis_root(nt: Polynomial, nm: Polynomial) -> float | None:
    """Float path: nonnegative roots of ``nm`` not cancelled by ``nt``."""
    rt = cluster_roots(nt.roots()) if nt.degree >= 1 else []
    for z, mult in cluster_roots(nm.roots()):
        if abs(z.imag) <= CRIT_IMAG_TOL and z.real >= -CRIT_REAL_TOL:
            matched = sum(k for y, k in rt if abs(y - z) <= CLUSTER_TOL * max(1.0, abs(z)))
            if matched < mult:
                return max(z.real, 0.0)
    return None


@lru_cache(maxsize=4096)
def _open_rhp_zeros(p: Polynomial) -> tuple[complex, ...]:
    return tuple(z for z, _ in p.roots_with_multiplicity() if z.real > UNSTABLE_ZERO_TOL)


def _unmatched_unstable_zeros(pt: Polynomial, pm: Polynomial) -> list[complex]:
    """Open right-half-plane zeros of ``pm`` that ``pt`` does not share."""
    if pm.degree < 1 or not _open_rhp_zeros(pm):
        return []
    if pt.is_exact and pm.is_exact:
        return list(_open_rhp_zeros(pm.exact_div(pt.gcd(pm))))
    rt = cluster_roots(pt.roots()) if pt.degree >= 1 else []
    left = []
    for z, mult in cluster_roots(pm.roots()):
        if z.real > UNSTABLE_ZERO_TOL:
            matched = sum(k for y, k in rt if abs(y - z) <= CLUSTER_TOL * max(1.0, abs(z)))
            if matched < mult:
                left.append(z)
    return left


# -- frequency-grid oracle -------------------------------------------------------
def _grid(omega_min: float, omega_max: float, n_points: int) -> np.ndarray:
    return np.logspace(math.log10(omega_min), math.log10(omega_max), int(n_points))


def grid_gain_oracle(
    scenario: AttackScenario,
    omega_max: float = 1e3,
    n_points: int = 100_000,
    omega_min: float = 1e-6,
    chunk: int = 5000,
) -> float:
    """Maximum of the frequency-response energy ratio over a log grid.

    Each point solves ``(j omega I + L) x = e_a``.  The result is a lower
    bound on the true gain.
    """
    lap = scenario.graph.laplacian_float()
    n = lap.shape[0]
    t, a, m = scenario.target - 1, scenario.attack - 1, scenario.monitor - 1
    rhs = np.zeros(n, dtype=complex)
    rhs[a] = 1.0
    best = 0.0
    skipped = 0
    omegas = _grid(omega_min, omega_max, n_points)
    for lo in range(0, omegas.size, chunk):
        w = omegas[lo : lo + chunk]
        mats = 1j * w[:, None, None] * np.eye(n) + lap
        x = np.linalg.solve(mats, np.broadcast_to(rhs, (w.size, n))[..., None])[..., 0]
        num = np.abs(x[:, t]) ** 2
        den = np.abs(x[:, m]) ** 2
        ok = den > 1e-300
        skipped += int((~ok).sum())
        if ok.any():
            best = max(best, float(np.max(num[ok] / den[ok])))
    if skipped:
        logger.warning("grid oracle skipped %d points at monitor zeros", skipped)
    return best


def grid_gain_table(
    g: Graph,
    omega_max: float = 1e3,
    n_points: int = 100_000,
    omega_min: float = 1e-6,
    chunk: int = 1000,
) -> np.ndarray:
    """Grid oracle for every ``(target, attack, monitor)`` at once.

    Returns ``R[t-1, a-1, m-1]``; one batched solve per frequency covers all
    triples.
    """
    lap = g.laplacian_float()
    n = lap.shape[0]
    best = np.zeros((n, n, n))
    omegas = _grid(omega_min, omega_max, n_points)
    eye = np.eye(n)
    for lo in range(0, omegas.size, chunk):
        w = omegas[lo : lo + chunk]
        inv = np.linalg.solve(1j * w[:, None, None] * eye + lap, np.broadcast_to(eye, (w.size, n, n)))
        mag = np.abs(inv) ** 2  # mag[k, u, a]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = mag[:, :, :, None] / mag.transpose(0, 2, 1)[:, None, :, :]
        best = np.maximum(best, np.nanmax(r, axis=0))
    return best
