"""Time-domain simulation of the attacked consensus network.

``x' = -L x + e_a a(t)`` with ``x(0) = 0`` integrated by classical RK4.
Because ``L`` is symmetric the step decouples into scalar modes; the
``modal`` method applies the exact RK4 recurrence of each mode with a linear
filter, the ``direct`` method is the textbook loop and serves as a check.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .graph import Graph
from .lti import VertexRole
from .polynomial import Polynomial

logger = logging.getLogger(__name__)

MAX_STEP_FACTOR = 0.1
DEFAULT_STEP_FACTOR = 0.05
DISCARD_FRACTION = 0.2
STEPS_PER_PERIOD = 40
MIN_PERIODS = 50


class UnstableStepError(ValueError):
    def __init__(self, dt: float, limit: float):
        super().__init__(f"dt={dt:.4g} exceeds the explicit-integration limit; use dt <= {limit:.4g}")
        self.dt = dt
        self.limit = limit


class SignalKind(str, enum.Enum):
    SINE = "sine"
    CHIRP = "chirp"
    SAMPLES = "samples"


@dataclass(frozen=True)
class AttackSignal:
    """Attack input ``a(t)``.

    ``sine``: ``amplitude * sin(2 pi f t + phase)``.  ``chirp``: linear
    sweep from ``frequency`` to ``f_end`` over ``duration`` seconds.
    ``samples``: values at ``rate`` Hz, linearly interpolated and zero after
    the last sample.
    """

    kind: SignalKind = SignalKind.SINE
    amplitude: float = 1.0
    frequency: float = 0.0
    phase: float = 0.0
    f_end: float | None = None
    duration: float | None = None
    samples: tuple[float, ...] | None = None
    rate: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SignalKind(self.kind))
        if not math.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        if self.kind is SignalKind.SINE and not (math.isfinite(self.frequency) and self.frequency >= 0):
            raise ValueError("sine frequency must be a nonnegative number of Hz")
        if self.kind is SignalKind.CHIRP:
            if self.f_end is None or not self.duration or self.duration <= 0:
                raise ValueError("chirp needs f_end and a positive duration")
        if self.kind is SignalKind.SAMPLES:
            if self.samples is None or not self.rate or self.rate <= 0:
                raise ValueError("sampled signal needs samples and a positive rate")
            s = tuple(float(x) for x in self.samples)
            if not all(math.isfinite(x) for x in s):
                raise ValueError("samples must be finite")
            object.__setattr__(self, "samples", s)

    @classmethod
    def sine(cls, frequency: float, amplitude: float = 1.0, phase: float = 0.0) -> AttackSignal:
        return cls(SignalKind.SINE, amplitude, frequency, phase)

    @classmethod
    def cosine(cls, frequency: float, amplitude: float = 1.0) -> AttackSignal:
        """Zero-mean steady state for the integrator mode (no DC drift)."""
        return cls(SignalKind.SINE, amplitude, frequency, math.pi / 2)

    @property
    def omega(self) -> float:
        return 2 * math.pi * self.frequency

    def scaled(self, c: float) -> AttackSignal:
        return AttackSignal(
            self.kind, self.amplitude * c, self.frequency, self.phase,
            self.f_end, self.duration, self.samples, self.rate,
        )

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind is SignalKind.SINE:
            return self.amplitude * np.sin(self.omega * t + self.phase)
        if self.kind is SignalKind.CHIRP:
            k = (self.f_end - self.frequency) / self.duration
            tc = np.minimum(t, self.duration)
            ph = 2 * math.pi * (self.frequency * tc + 0.5 * k * tc**2)
            # keep going at the final frequency after the sweep ends
            ph = ph + 2 * math.pi * self.f_end * np.maximum(t - self.duration, 0.0)
            return self.amplitude * np.sin(ph + self.phase)
        grid = np.arange(len(self.samples)) / self.rate
        return self.amplitude * np.interp(t, grid, self.samples, right=0.0)


@dataclass
class SimulationTrace:
    t: np.ndarray
    y_target: np.ndarray
    y_monitor: np.ndarray
    states: np.ndarray | None = None
    dt: float = 0.0

    @property
    def horizon(self) -> float:
        return float(self.t[-1])

    def energies(self, discard: float = 0.0) -> tuple[float, float]:
        """Trapezoidal ``int y**2 dt`` over ``[discard * T, T]``."""
        start = int(round(discard * (len(self.t) - 1)))
        t = self.t[start:]
        return (
            float(np.trapezoid(self.y_target[start:] ** 2, t)),
            float(np.trapezoid(self.y_monitor[start:] ** 2, t)),
        )

    @property
    def energy_target(self) -> float:
        return self.energies()[0]

    @property
    def energy_monitor(self) -> float:
        return self.energies()[1]

    def steady_ratio(self, discard: float = DISCARD_FRACTION) -> float:
        et, em = self.energies(discard)
        return et / em if em > 0 else math.inf

    def to_csv(self, path) -> None:
        if self.states is None:
            raise ValueError("trace was simulated without store_states=True")
        n = self.states.shape[1]
        head = ["t", *(f"x_{i}" for i in range(1, n + 1)), "y_tau", "y_m"]
        data = np.column_stack([self.t, self.states, self.y_target, self.y_monitor])
        np.savetxt(path, data, delimiter=",", header=",".join(head), comments="", fmt="%.10g")


def stable_step(g: Graph) -> float:
    return MAX_STEP_FACTOR / g.lambda_max


def default_step(g: Graph, max_frequency: float = 0.0) -> float:
    """``0.05 / lambda_max``, refined so each period gets 40 steps."""
    dt = DEFAULT_STEP_FACTOR / g.lambda_max
    if max_frequency > 0:
        dt = min(dt, 1.0 / (STEPS_PER_PERIOD * max_frequency))
    return dt


def default_horizon(g: Graph, min_frequency: float = 0.0) -> float:
    """``max(200 / lambda_2, 50 periods of the slowest frequency)``."""
    t = 200.0 / g.algebraic_connectivity
    if min_frequency > 0:
        t = max(t, MIN_PERIODS / min_frequency)
    return t


def _rk4_input_weights(mu: np.ndarray):
    """Weights of ``u_k, u_{k+1/2}, u_{k+1}`` in one RK4 step of ``z' = -lam z + u``."""
    w0 = (1 + mu + mu**2 / 2 + mu**3 / 4) / 6
    wh = (4 + 2 * mu + mu**2 / 2) / 6
    w1 = np.full_like(mu, 1 / 6)
    return w0, wh, w1


def simulate(
    g: Graph,
    roles: VertexRole,
    signal: AttackSignal,
    T: float,
    dt: float | None = None,
    *,
    method: str = "modal",
    store_states: bool = False,
) -> SimulationTrace:
    roles.validate(g, allow_monitor_at_target=True)
    if dt is None:
        dt = default_step(g, _signal_max_frequency(signal))
    limit = stable_step(g)
    if not dt > 0:
        raise ValueError("dt must be positive")
    if dt > limit * (1 + 1e-12):
        raise UnstableStepError(dt, limit)
    if not T >= dt:
        raise ValueError(f"horizon T={T} shorter than dt={dt}")
    steps = int(math.ceil(T / dt - 1e-9))
    t = np.arange(steps + 1) * dt
    u = signal(np.arange(2 * steps + 1) * (dt / 2))
    if method == "modal":
        return _simulate_modal(g, roles, u, t, dt, store_states)
    if method == "direct":
        return _simulate_direct(g, roles, u, t, dt, store_states)
    raise ValueError(f"unknown method {method!r}")


def _signal_max_frequency(signal: AttackSignal) -> float:
    if signal.kind is SignalKind.SINE:
        return signal.frequency
    if signal.kind is SignalKind.CHIRP:
        return max(signal.frequency, signal.f_end)
    return signal.rate / 2


def _simulate_modal(g, roles, u, t, dt, store_states):
    lam, vecs = np.linalg.eigh(g.laplacian_float())
    lam = np.maximum(lam, 0.0)
    a, tau, m = roles.attack - 1, roles.target - 1, roles.monitor - 1
    mu = -lam * dt
    rho = 1 + mu + mu**2 / 2 + mu**3 / 6 + mu**4 / 24
    w0, wh, w1 = _rk4_input_weights(mu)
    u0, uh, u1 = u[0:-1:2], u[1::2], u[2::2]
    n = lam.size
    y_t = np.zeros(t.size)
    y_m = np.zeros(t.size)
    states = np.zeros((t.size, n)) if store_states else None
    for k in range(n):
        beta = vecs[a, k]
        if beta == 0 and not store_states:
            continue
        f = dt * beta * (w0[k] * u0 + wh[k] * uh + w1[k] * u1)
        z = np.empty(t.size)
        z[0] = 0.0
        z[1:] = lfilter([1.0], [1.0, -rho[k]], f)
        y_t += vecs[tau, k] * z
        y_m += vecs[m, k] * z
        if store_states:
            states += np.outer(z, vecs[:, k])
    return SimulationTrace(t, y_t, y_m, states, dt)


def _simulate_direct(g, roles, u, t, dt, store_states):
    lap = g.laplacian_float()
    n = lap.shape[0]
    b = np.zeros(n)
    b[roles.attack - 1] = 1.0
    x = np.zeros(n)
    xs = np.zeros((t.size, n))
    for k in range(t.size - 1):
        u0, uh, u1 = u[2 * k], u[2 * k + 1], u[2 * k + 2]
        k1 = -lap @ x + b * u0
        k2 = -lap @ (x + 0.5 * dt * k1) + b * uh
        k3 = -lap @ (x + 0.5 * dt * k2) + b * uh
        k4 = -lap @ (x + dt * k3) + b * u1
        x = x + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        xs[k + 1] = x
    return SimulationTrace(
        t, xs[:, roles.target - 1].copy(), xs[:, roles.monitor - 1].copy(),
        xs if store_states else None, dt,
    )


def stealthiness(trace: SimulationTrace, delta: float = 1.0) -> bool:
    """Monitor energy stays strictly below the alarm threshold."""
    if not delta > 0:
        raise ValueError("alarm threshold must be positive")
    return trace.energy_monitor < delta


@dataclass(frozen=True)
class SweepPoint:
    f_hz: float
    energy_target: float
    energy_monitor: float

    @property
    def ratio(self) -> float:
        return self.energy_target / self.energy_monitor if self.energy_monitor > 0 else math.inf


def energy_ratio_sweep(
    g: Graph,
    roles: VertexRole,
    frequencies,
    T: float | None = None,
    dt: float | None = None,
    discard: float = DISCARD_FRACTION,
) -> list[SweepPoint]:
    """Steady-state energy ratio under a unit cosine at each frequency."""
    freqs = [float(f) for f in frequencies]
    if not freqs:
        raise ValueError("no sweep frequencies given")
    for f in freqs:
        if not (math.isfinite(f) and f > 0):
            raise ValueError(
                f"sweep frequency {f} Hz rejected: it must be positive "
                "(the zero-frequency ratio is the analytic w = 0 candidate)"
            )
    if T is None:
        T = default_horizon(g, min(freqs))
    if dt is None:
        dt = default_step(g, max(freqs))
    out = []
    for f in freqs:
        tr = simulate(g, roles, AttackSignal.cosine(f), T, dt)
        et, em = tr.energies(discard)
        out.append(SweepPoint(f, et, em))
    return out


def sweep_to_csv(points: list[SweepPoint], path) -> None:
    with open(path, "w") as fh:
        fh.write("f_hz,energy_target,energy_monitor,ratio\n")
        for p in points:
            fh.write(f"{p.f_hz:.6g},{p.energy_target:.6g},{p.energy_monitor:.6g},{p.ratio:.6g}\n")


def loglog_slope(points: list[SweepPoint]) -> float:
    """Least-squares slope of ``log ratio`` against ``log f``."""
    f = np.log([p.f_hz for p in points])
    r = np.log([p.ratio for p in points])
    return float(np.polyfit(f, r, 1)[0])


# -- analytic helpers for choosing test frequencies ------------------------------
def analytic_ratio(nt: Polynomial, nm: Polynomial, omega):
    """``N_t(w) / N_m(w)`` at ``w = omega**2``."""
    w = np.asarray(omega, dtype=float) ** 2
    return nt.to_float()(w) / nm.to_float()(w)


def probe_frequency(nt: Polynomial, nm: Polynomial, gain: float, omega_star: float,
                    scale: float, rel: float = 0.01) -> float:
    """Angular frequency to excite when measuring a gain.

    An interior supremum is probed at ``omega_star``.  A supremum at zero or
    infinity is not reachable by a sinusoid, so the nearest decade point
    (stepping from ``scale``) whose analytic ratio is within ``rel`` of the
    gain is used instead.
    """
    if 0 < omega_star < math.inf:
        return omega_star
    step = 0.5 if omega_star == 0 else 2.0
    om = scale
    for _ in range(200):
        if analytic_ratio(nt, nm, om) >= (1 - rel) * gain:
            return om
        om *= step
    raise ArithmeticError("no probe frequency reaches the requested fraction of the gain")


def asymptotic_band(nt: Polynomial, nm: Polynomial, order: int, scale: float, rel: float = 0.02
                    ) -> tuple[float, float]:
    """One decade ``(w_lo, w_hi)`` in rad/s where the log-log slope is within ``rel`` of ``order``."""

    def slope(om):
        w = om**2
        g = nt.to_float()
        h = nm.to_float()
        return 2 * w * (g.derivative()(w) / g(w) - h.derivative()(w) / h(w))

    lo = scale
    for _ in range(200):
        band = np.geomspace(lo, 10 * lo, 9)
        if all(abs(slope(om) - order) <= rel * order for om in band):
            return lo, 10 * lo
        lo *= 2
    raise ArithmeticError("log-log slope never settles")
