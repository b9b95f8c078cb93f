"""Real univariate polynomials.

Coefficients are stored in ascending order.  Integer and ``Fraction``
coefficients stay exact through every arithmetic operation (including
exact division and gcd), which the graph layer relies on for unit-weight
networks.  Float coefficients are accepted for weighted graphs; exact-only
operations then raise ``TypeError``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Number

import numpy as np

ABERTH_TOL = 1e-12
ABERTH_MAXITER = 500
CLUSTER_TOL = 1e-6


def _scalar(c):
    if isinstance(c, (bool, np.bool_)):
        return int(c)
    if isinstance(c, np.integer):
        return int(c)
    if isinstance(c, np.floating):
        return float(c)
    if isinstance(c, np.complexfloating):
        return complex(c)
    return c


def _exact(c) -> bool:
    return isinstance(c, (int, Fraction))


class Polynomial:
    """Polynomial ``c[0] + c[1] s + ... + c[n] s**n``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_scalar(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> Polynomial:
        return cls(())

    @classmethod
    def one(cls) -> Polynomial:
        return cls((1,))

    @classmethod
    def monomial(cls, k: int, c=1) -> Polynomial:
        return cls((0,) * k + (c,))

    @classmethod
    def from_roots(cls, roots) -> Polynomial:
        p = cls.one()
        for r in roots:
            p = p * cls((-r, 1))
        return p

    # -- basic properties -------------------------------------------------
    @property
    def degree(self):
        """Degree; ``-inf`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def is_exact(self) -> bool:
        return all(_exact(c) for c in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("s" if k == 1 else f"s^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ")

    def __eq__(self, other):
        if isinstance(other, Number):
            other = Polynomial((other,))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- conversions ------------------------------------------------------
    def to_float(self) -> Polynomial:
        return Polynomial(float(c) for c in self.coeffs)

    def as_array(self, dtype=float) -> np.ndarray:
        return np.array([dtype(c) for c in self.coeffs], dtype=dtype)

    def monic(self) -> Polynomial:
        lead = self.leading
        if lead == 0:
            raise ZeroDivisionError("zero polynomial has no monic form")
        if self.is_exact:
            return Polynomial(Fraction(c) / lead for c in self.coeffs)
        return Polynomial(c / lead for c in self.coeffs)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Number):
            other = Polynomial((other,))
        n = max(len(self), len(other))
        return Polynomial(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Number):
            other = Polynomial((other,))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return Polynomial(c * other for c in self.coeffs)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Polynomial.zero()
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial.one()
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> Polynomial:
        return Polynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            out = np.zeros_like(x, dtype=np.result_type(x, float))
            cs = [complex(c) if isinstance(c, complex) else float(c) for c in self.coeffs]
        else:
            out = 0
            cs = self.coeffs
        for c in reversed(cs):
            out = out * x + c
        return out

    def substitute_scale(self, a) -> Polynomial:
        """Return ``p(a * s)``."""
        return Polynomial(c * a**k for k, c in enumerate(self.coeffs))

    def __divmod__(self, other: Polynomial):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if len(self) < len(other):
            return Polynomial.zero(), self
        if _all_int(self) and _all_int(other):
            res = _int_divmod(self.coeffs, other.coeffs)
            if res is not None:
                return Polynomial(res[0]), Polynomial(res[1])
        exact = self.is_exact and other.is_exact
        rem = [Fraction(c) if exact else c for c in self.coeffs]
        lead = other.leading
        dq = len(rem) - len(other)
        quot = [0] * (dq + 1)
        for k in range(dq, -1, -1):
            q = rem[k + len(other) - 1] / lead
            quot[k] = q
            if q != 0:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= q * b
        rem = rem[: len(other) - 1]
        return _demote(Polynomial(quot)), _demote(Polynomial(rem))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: Polynomial) -> Polynomial:
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    # -- exact algebra ----------------------------------------------------
    def gcd(self, other: Polynomial) -> Polynomial:
        """Greatest common divisor, exact coefficients only.

        Normalised to a primitive integer polynomial with positive leading
        coefficient (primitive remainder sequence, no fractions).
        """
        if not (self.is_exact and other.is_exact):
            raise TypeError("gcd requires exact coefficients")
        a, b = _primitive(_clear_denominators(self)), _primitive(_clear_denominators(other))
        if len(a) < len(b):
            a, b = b, a
        while b:
            r = _prem(a, b)
            a, b = b, _primitive(r)
        return Polynomial(a)

    def squarefree_decomposition(self) -> list[tuple[Polynomial, int]]:
        """Yun's algorithm: ``self = lead * prod f_i**i`` with f_i square-free."""
        if not self.is_exact:
            raise TypeError("square-free decomposition requires exact coefficients")
        if self.degree < 1:
            return []
        f = self
        fp = f.derivative()
        a = f.gcd(fp)
        b = f.exact_div(a)
        c = fp.exact_div(a)
        d = c - b.derivative()
        out = []
        i = 1
        while b.degree >= 1:
            a = b.gcd(d)
            b = b.exact_div(a)
            c = d.exact_div(a)
            d = c - b.derivative()
            if a.degree >= 1:
                out.append((a, i))
            i += 1
        return out

    def squarefree_part(self) -> Polynomial:
        out = Polynomial.one()
        for f, _ in self.squarefree_decomposition():
            out = out * f
        return out

    def sturm_count(self, lo, hi=None) -> int:
        """Number of distinct real roots in ``(lo, hi]``; ``hi=None`` means +inf."""
        if not self.is_exact:
            raise TypeError("Sturm counting requires exact coefficients")
        if self.degree < 1:
            return 0
        sqf = self.exact_div(self.gcd(self.derivative()))
        first = _primitive(_clear_denominators(sqf), keep_sign=True)
        seq = [first, _primitive(_clear_denominators(sqf.derivative()), keep_sign=True)]
        while seq[-1]:
            # |lead|^d scaling keeps the remainder's sign
            rem = _prem(seq[-2], seq[-1], positive=True)
            seq.append(_primitive([-c for c in rem], keep_sign=True))
        seq.pop()
        seq = [Polynomial(q) for q in seq]

        def changes(vals):
            signs = [v for v in vals if v != 0]
            return sum(1 for x, y in zip(signs, signs[1:]) if (x > 0) != (y > 0))

        at_lo = changes([p(lo) for p in seq])
        if hi is None:
            at_hi = changes([p.leading for p in seq])
        else:
            at_hi = changes([p(hi) for p in seq])
        return at_lo - at_hi

    # -- numerics ----------------------------------------------------------
    def roots(self) -> np.ndarray:
        """All complex roots of a square-free-ish polynomial via Aberth-Ehrlich."""
        return aberth_roots(self.coeffs)

    def roots_with_multiplicity(self) -> list[tuple[complex, int]]:
        """Distinct roots paired with their multiplicities.

        Exact polynomials are split by square-free decomposition first, so
        repeated roots never reach the iterative solver.  Float polynomials
        are rooted directly and clustered at ``CLUSTER_TOL``.
        """
        if self.degree < 1:
            return []
        if self.is_exact:
            out = []
            for f, mult in self.squarefree_decomposition():
                out.extend((complex(z), mult) for z in f.roots())
            return out
        return cluster_roots(self.roots())

    def norm_at(self, z) -> float:
        """Coefficient scale ``sum |c_k| |z|**k`` used for residual tests."""
        az = abs(z)
        return float(sum(abs(float(c) if _exact(c) else c) * az**k for k, c in enumerate(self.coeffs)))


def _demote(p: Polynomial) -> Polynomial:
    """Turn integral Fractions back into ints."""
    if not p.is_exact:
        return p
    return Polynomial(
        int(c) if isinstance(c, Fraction) and c.denominator == 1 else c for c in p.coeffs
    )


def _all_int(p: Polynomial) -> bool:
    return all(isinstance(c, int) for c in p.coeffs)


def _int_divmod(a, b):
    """Integer long division, or None when a quotient digit is not integral."""
    rem = list(a)
    lead = b[-1]
    dq = len(rem) - len(b)
    quot = [0] * (dq + 1)
    for k in range(dq, -1, -1):
        top = rem[k + len(b) - 1]
        q, r = divmod(top, lead)
        if r:
            return None
        quot[k] = q
        if q:
            for j, c in enumerate(b):
                rem[k + j] -= q * c
    return quot, rem[: len(b) - 1]


def _clear_denominators(p: Polynomial) -> list[int]:
    den = 1
    for c in p.coeffs:
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
    return [int(c * den) for c in p.coeffs]


def _strip(cs: list) -> list:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _primitive(cs: list[int], keep_sign: bool = False) -> list[int]:
    cs = _strip(list(cs))
    if not cs:
        return cs
    g = 0
    for c in cs:
        g = math.gcd(g, c)
    if cs[-1] < 0 and not keep_sign:
        g = -g
    return [c // g for c in cs]


def _prem(a: list[int], b: list[int], positive: bool = False) -> list[int]:
    """Pseudo-remainder of ``lead(b)**d * a`` by ``b`` in integers."""
    lead = b[-1]
    scale = abs(lead) if positive else lead
    d = len(a) - len(b) + 1
    if d <= 0:
        return list(a)
    rem = [c * scale**d for c in a]
    for k in range(len(a) - len(b), -1, -1):
        q = rem[k + len(b) - 1] // lead
        if q:
            for j, c in enumerate(b):
                rem[k + j] -= q * c
    return _strip(rem[: len(b) - 1])


def aberth_roots(coeffs, tol: float = ABERTH_TOL, maxiter: int = ABERTH_MAXITER) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration.

    Starting points sit on a circle whose radius is the Fujiwara bound
    ``2 max |c_k / c_n|**(1/(n-k))``, with a fixed angular offset so
    conjugate pairs are not seeded symmetrically.
    """
    c = np.array([complex(x) for x in coeffs], dtype=complex)
    while c.size and c[-1] == 0:
        c = c[:-1]
    n = c.size - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    # exact zeros at the origin
    nzero = 0
    while c[0] == 0:
        c = c[1:]
        nzero += 1
    n = c.size - 1
    if n < 1:
        return np.zeros(nzero, dtype=complex)
    c = c / c[-1]
    high = c[::-1]
    dhigh = np.polyder(high)
    radius = 2.0 * np.max(np.abs(c[:-1]) ** (1.0 / (n - np.arange(n))))
    k = np.arange(n)
    z = radius * np.exp(1j * (2 * np.pi * k / n + 0.4))
    # small radial jitter breaks symmetric stalls on palindromic inputs
    z *= 1.0 + 1e-3 * np.cos(1.7 * k)
    off = ~np.eye(n, dtype=bool)
    # |p(z)| below this bound is indistinguishable from rounding noise
    abs_high = np.abs(high)
    eps_scale = 8 * n * np.finfo(float).eps
    done = np.zeros(n, dtype=bool)
    powers = np.arange(n + 1)
    dc = c[1:] * powers[1:]
    abs_c = np.abs(c)
    for _ in range(maxiter):
        p, dp, noise = _eval_with_bound(c, dc, abs_c, powers, z, high, dhigh, abs_high)
        noise *= eps_scale
        done |= np.abs(p) <= noise
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(p == 0, 0, p / dp)
            diff = z[:, None] - z[None, :]
            inv = np.where(off, 1.0 / np.where(off, diff, 1.0), 0.0)
            s = inv.sum(axis=1)
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w) & ~done, w, 0.0)
        z = z - w
        done |= np.abs(w) <= tol * (1.0 + np.abs(z))
        if done.all():
            break
    z = _newton_polish(high, dhigh, z)
    if nzero:
        z = np.concatenate([np.zeros(nzero, dtype=complex), z])
    return z


def _eval_with_bound(c, dc, abs_c, powers, z, high, dhigh, abs_high):
    """``p(z)``, ``p'(z)`` and ``sum |c_k| |z|**k`` in one power-matrix pass."""
    with np.errstate(over="ignore", invalid="ignore"):
        v = z[:, None] ** powers
        p = v @ c
        dp = v[:, :-1] @ dc
        bound = np.abs(v) @ abs_c
    if np.isfinite(bound).all():
        return p, dp, bound
    return np.polyval(high, z), np.polyval(dhigh, z), np.polyval(abs_high, np.abs(z))


def _newton_polish(high, dhigh, z, steps: int = 3):
    for _ in range(steps):
        p = np.polyval(high, z)
        dp = np.polyval(dhigh, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(dp != 0, p / dp, 0)
        new = z - step
        better = np.abs(np.polyval(high, new)) < np.abs(p)
        z = np.where(better & np.isfinite(new), new, z)
    return z


def cluster_roots(roots, tol: float = CLUSTER_TOL) -> list[tuple[complex, int]]:
    """Group roots closer than ``tol`` (relative to max(1, |z|))."""
    remaining = [complex(z) for z in roots]
    out = []
    while remaining:
        z0 = remaining.pop(0)
        group = [z0]
        rest = []
        for z in remaining:
            if abs(z - z0) <= tol * max(1.0, abs(z0)):
                group.append(z)
            else:
                rest.append(z)
        remaining = rest
        out.append((complex(np.mean(group)), len(group)))
    return out
