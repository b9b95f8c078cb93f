"""SISO channels of the consensus network under attack.

For attack vertex ``a`` and output vertex ``u`` the channel is
``(-L, e_a, e_u^T, 0)`` with transfer function ``P_ua(s) / Q(s)`` where
``Q(s) = det(sI + L)`` and ``P_ua(s) = [adj(sI + L)]_{ua}``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .graph import Graph, GraphError
from .polynomial import Polynomial

logger = logging.getLogger(__name__)

MARKOV_TOL = 1e-9
ZERO_TOL_REAL = 1e-7
ZERO_TOL_IMAG = 1e-7
RESIDUAL_TOL = 1e-8


def _is_exact_matrix(m: np.ndarray) -> bool:
    return m.dtype == object


def _identity_like(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if _is_exact_matrix(m):
        eye = np.zeros((n, n), dtype=object)
        eye[:] = 0
        for i in range(n):
            eye[i, i] = 1
        return eye
    return np.eye(n)


def faddeev_leverrier(laplacian: np.ndarray) -> tuple[Polynomial, list[np.ndarray]]:
    """Characteristic polynomial and adjugate coefficients of ``sI + L``.

    Returns ``(Q, [B_0, ..., B_{N-1}])`` with
    ``adj(sI + L) = sum_k B_k s**(N-1-k)``.  For integer Laplacians every
    division by ``k`` is exact and checked.
    """
    m = -np.asarray(laplacian)
    if m.dtype != object:
        m = m.astype(float)
    n = m.shape[0]
    exact = _is_exact_matrix(m)
    eye = _identity_like(m)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mats = []
    b = eye
    for k in range(1, n + 1):
        mats.append(b)
        mb = m.dot(b)
        tr = sum(mb[i, i] for i in range(n))
        if exact:
            c, rem = divmod(-int(tr), k)
            if rem:
                raise ArithmeticError("non-integral Faddeev-LeVerrier coefficient")
        else:
            c = -float(tr) / k
        coeffs[n - k] = c
        b = mb + c * eye
    return Polynomial(coeffs), mats


def characteristic_polynomial(laplacian: np.ndarray) -> Polynomial:
    """``Q(s) = det(sI + L)``."""
    return faddeev_leverrier(laplacian)[0]


def numerator_polynomial(laplacian: np.ndarray, out: int, inp: int) -> Polynomial:
    """``e_out^T adj(sI + L) e_in`` (vertices 1-based)."""
    _, mats = faddeev_leverrier(laplacian)
    return _entry_poly(mats, out - 1, inp - 1)


def _entry_poly(mats, i, j) -> Polynomial:
    n = len(mats)
    return Polynomial(mats[n - 1 - p][i, j] for p in range(n))


def cofactor_numerator(laplacian: np.ndarray, out: int, inp: int) -> Polynomial:
    """Same quantity as :func:`numerator_polynomial` by cofactor expansion.

    Memoised Laplace expansion over column subsets; meant as an independent
    check for small networks (exponential in N).
    """
    l = np.asarray(laplacian)
    n = l.shape[0]
    i, j = out - 1, inp - 1
    # adj[i, j] = (-1)^(i+j) * minor with row j and column i removed
    rows = [r for r in range(n) if r != j]
    cols = [c for c in range(n) if c != i]
    entries = [
        [Polynomial((l[r, c],)) + (Polynomial((0, 1)) if r == c else 0) for c in cols]
        for r in rows
    ]
    minor = _det_poly(entries)
    return minor if (i + j) % 2 == 0 else -minor


def _det_poly(entries) -> Polynomial:
    size = len(entries)
    if size == 0:
        return Polynomial.one()

    @lru_cache(maxsize=None)
    def expand(row: int, used: int) -> Polynomial:
        if row == size:
            return Polynomial.one()
        total = Polynomial.zero()
        sign_pos = 0
        for c in range(size):
            if used >> c & 1:
                continue
            e = entries[row][c]
            if not e.is_zero():
                term = e * expand(row + 1, used | (1 << c))
                total = total + (term if sign_pos % 2 == 0 else -term)
            sign_pos += 1
        return total

    return expand(0, 0)


def markov_parameters(laplacian: np.ndarray, out: int, inp: int, count: int) -> list:
    """``e_out^T (-L)^k e_in`` for ``k = 0..count-1``."""
    l = np.asarray(laplacian)
    n = l.shape[0]
    v = np.zeros(n, dtype=l.dtype if l.dtype == object else float)
    v[:] = 0
    v[inp - 1] = 1
    out_vals = []
    for _ in range(count):
        out_vals.append(v[out - 1])
        v = -l.dot(v)
    return out_vals


def relative_degree(laplacian: np.ndarray, out: int, inp: int) -> int:
    """Smallest ``r`` with a nonzero Markov parameter ``C A^(r-1) B``."""
    l = np.asarray(laplacian)
    n = l.shape[0]
    exact = l.dtype == object
    for k, h in enumerate(markov_parameters(l, out, inp, n)):
        if (h != 0) if exact else abs(h) > MARKOV_TOL * n:
            return k + 1
    raise GraphError(f"no path from vertex {inp} to vertex {out}; graph must be connected")


@dataclass(frozen=True)
class VertexRole:
    target: int
    attack: int
    monitor: int

    def validate(self, g: Graph, allow_monitor_at_target: bool = False):
        for name in ("target", "attack", "monitor"):
            g._check(getattr(self, name))
        if self.attack == self.target:
            raise GraphError("attack vertex must differ from the target")
        if self.monitor == self.target and not allow_monitor_at_target:
            raise GraphError("monitor vertex must differ from the target")


class ChannelTable:
    """All transfer-function data of one graph, computed once."""

    def __init__(self, g: Graph):
        self.graph = g
        l = g.laplacian
        self.char_poly, mats = faddeev_leverrier(l)
        self._num = {
            (u, a): _entry_poly(mats, u - 1, a - 1)
            for u in g.vertices
            for a in g.vertices
        }
        self._reldeg = {}
        for a in g.vertices:
            for u in g.vertices:
                self._reldeg[(u, a)] = relative_degree(l, u, a)

    def numerator(self, out: int, inp: int) -> Polynomial:
        return self._num[(out, inp)]

    def relative_degree(self, out: int, inp: int) -> int:
        return self._reldeg[(out, inp)]


@lru_cache(maxsize=64)
def channel_table(g: Graph) -> ChannelTable:
    return ChannelTable(g)


@dataclass(frozen=True)
class AttackScenario:
    graph: Graph
    roles: VertexRole
    char_poly: Polynomial
    numerator_target: Polynomial
    numerator_monitor: Polynomial
    r_target: int
    r_monitor: int

    @property
    def target(self):
        return self.roles.target

    @property
    def attack(self):
        return self.roles.attack

    @property
    def monitor(self):
        return self.roles.monitor


def build_scenario(
    g: Graph, target: int, attack: int, monitor: int, *, allow_monitor_at_target: bool = False
) -> AttackScenario:
    roles = VertexRole(target, attack, monitor)
    roles.validate(g, allow_monitor_at_target=allow_monitor_at_target)
    tab = channel_table(g)
    return AttackScenario(
        graph=g,
        roles=roles,
        char_poly=tab.char_poly,
        numerator_target=tab.numerator(target, attack),
        numerator_monitor=tab.numerator(monitor, attack),
        r_target=tab.relative_degree(target, attack),
        r_monitor=tab.relative_degree(monitor, attack),
    )


@dataclass(frozen=True)
class ZeroSet:
    finite_zeros: tuple[complex, ...]
    infinite_zero_degree: int

    def distinct(self) -> list[complex]:
        out = []
        for z in self.finite_zeros:
            if not any(abs(z - w) <= 1e-6 * max(1.0, abs(w)) for w in out):
                out.append(z)
        return out


def zeros_of(numerator: Polynomial, rel_degree: int) -> ZeroSet:
    """Finite zeros (with multiplicity) of one channel numerator."""
    if numerator.is_zero():
        raise AssertionError("channel numerator vanishes identically")
    zs = []
    for z, mult in numerator.roots_with_multiplicity():
        resid = abs(numerator(z))
        scale = numerator.norm_at(z)
        if resid > RESIDUAL_TOL * scale:
            logger.warning("root %s of %s has residual %.3g (scale %.3g)", z, numerator, resid, scale)
        zs.extend([z] * mult)
    zs.sort(key=lambda z: (z.real, z.imag))
    return ZeroSet(tuple(zs), rel_degree)


def invariant_zeros(scenario: AttackScenario, channel: Literal["target", "monitor"]) -> ZeroSet:
    if channel == "target":
        return zeros_of(scenario.numerator_target, scenario.r_target)
    if channel == "monitor":
        return zeros_of(scenario.numerator_monitor, scenario.r_monitor)
    raise ValueError(f"channel must be 'target' or 'monitor', got {channel!r}")


def check_no_closed_positive_real_zeros(
    zeros: ZeroSet, tol_real: float = ZERO_TOL_REAL, tol_imag: float = ZERO_TOL_IMAG
) -> bool:
    return not any(abs(z.imag) <= tol_imag and z.real >= -tol_real for z in zeros.finite_zeros)


def closed_rhp_zeros(zeros: ZeroSet, tol: float = ZERO_TOL_REAL) -> list[complex]:
    """Finite zeros with ``Re z >= -tol`` (imaginary axis included)."""
    return [z for z in zeros.distinct() if z.real >= -tol]
