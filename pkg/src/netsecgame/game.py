"""Zero-sum monitor placement game.

The adversary picks the attack vertex (rows), the detector picks the monitor
vertex (columns) and pays the output-to-output gain.  Columns containing an
unbounded entry are never played by the detector, so the linear program only
ever sees finite numbers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .graph import Graph, GraphError
from .lti import build_scenario
from .oog import GainResult, output_to_output_gain

PROB_TOL = 1e-9
SADDLE_TOL = 1e-7
PIVOT_TOL = 1e-12


class InfeasibleGameError(RuntimeError):
    """Every monitor choice leaves some attack unbounded."""


class PayoffFormatError(ValueError):
    """Malformed payoff CSV; the message carries the row/column location."""


@dataclass(frozen=True)
class PayoffMatrix:
    target: int | None
    attack_actions: tuple[int, ...]
    monitor_actions: tuple[int, ...]
    entries: np.ndarray
    gains: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.shape != (len(self.attack_actions), len(self.monitor_actions)):
            raise ValueError(
                f"entries have shape {e.shape}, expected "
                f"{(len(self.attack_actions), len(self.monitor_actions))}"
            )
        if np.isnan(e).any() or (e == -np.inf).any():
            raise ValueError("payoff entries must be finite or +inf")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "attack_actions", tuple(int(a) for a in self.attack_actions))
        object.__setattr__(self, "monitor_actions", tuple(int(m) for m in self.monitor_actions))

    @classmethod
    def from_array(cls, entries, attack_actions=None, monitor_actions=None, target=None):
        e = np.asarray(entries, dtype=float)
        rows = attack_actions or tuple(range(1, e.shape[0] + 1))
        cols = monitor_actions or tuple(range(1, e.shape[1] + 1))
        return cls(target, tuple(rows), tuple(cols), e)

    @property
    def shape(self):
        return self.entries.shape

    def entry(self, attack: int, monitor: int) -> float:
        return float(self.entries[self.attack_actions.index(attack), self.monitor_actions.index(monitor)])

    @property
    def feasible_mask(self) -> np.ndarray:
        return np.isfinite(self.entries).all(axis=0)

    @property
    def feasible_monitors(self) -> list[int]:
        return [m for m, ok in zip(self.monitor_actions, self.feasible_mask) if ok]

    def feasible_submatrix(self) -> np.ndarray:
        return self.entries[:, self.feasible_mask]

    def rounded(self, digits: int = 6) -> PayoffMatrix:
        """The matrix exactly as the CSV writer serialises it."""
        e = np.array([[float(_fmt(x, digits)) for x in row] for row in self.entries])
        return PayoffMatrix(self.target, self.attack_actions, self.monitor_actions, e)


@dataclass(frozen=True)
class Equilibrium:
    p_a: np.ndarray
    p_m: np.ndarray
    value: float
    is_pure: bool
    support_a: tuple[int, ...]
    support_m: tuple[int, ...]
    adversary_value: float = math.nan
    full_matrix_pure: bool = False
    feasible_monitors: tuple[int, ...] = ()

    @property
    def duality_gap(self) -> float:
        return abs(self.value - self.adversary_value)

    def to_dict(self, matrix: PayoffMatrix | None = None) -> dict:
        d = {
            "value": self.value,
            "p_a": [float(x) for x in self.p_a],
            "p_m": [float(x) for x in self.p_m],
            "pure": self.is_pure,
            "support": {"attack": list(self.support_a), "monitor": list(self.support_m)},
            "full_matrix_pure_saddle": self.full_matrix_pure,
            "feasible_monitors": list(self.feasible_monitors),
            "duality_gap": self.duality_gap,
        }
        if matrix is not None:
            d = {
                "target": matrix.target,
                "attack_actions": list(matrix.attack_actions),
                "monitor_actions": list(matrix.monitor_actions),
                **d,
            }
        return d


# -- matrix assembly --------------------------------------------------------------
def build_payoff_matrix(g: Graph, target: int, delta: float = 1.0) -> PayoffMatrix:
    """``J[a, m]`` for every attack ``a != target`` and monitor ``m != target``."""
    g._check(target)
    if g.n_vertices < 2:
        raise GraphError("the game needs at least two vertices")
    actions = tuple(v for v in g.vertices if v != target)
    gains: dict[tuple[int, int], GainResult] = {}
    entries = np.empty((len(actions), len(actions)))
    for i, a in enumerate(actions):
        for j, m in enumerate(actions):
            res = output_to_output_gain(build_scenario(g, target, a, m), delta)
            gains[(a, m)] = res
            entries[i, j] = res.value
    return PayoffMatrix(target, actions, actions, entries, gains)


# -- linear programming -------------------------------------------------------------
def simplex_max(c, a_ub, b_ub, max_iter: int = 10_000):
    """Maximise ``c @ x`` subject to ``a_ub @ x <= b_ub``, ``x >= 0`` with ``b_ub >= 0``.

    Dense tableau with Bland's rule.  Returns ``(x, y, objective)`` where ``y``
    are the constraint duals.
    """
    a = np.asarray(a_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = a.shape
    if (b < 0).any():
        raise ValueError("simplex_max needs b_ub >= 0 so the slack basis is feasible")
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(max_iter):
        cost = tab[m, :-1]
        entering = next((j for j in range(n + m) if cost[j] < -PIVOT_TOL), None)
        if entering is None:
            break
        col = tab[:m, entering]
        rows = [i for i in range(m) if col[i] > PIVOT_TOL]
        if not rows:
            raise ArithmeticError("linear program is unbounded")
        ratios = [tab[i, -1] / col[i] for i in rows]
        best = min(ratios)
        # Bland: among tied rows leave with the smallest basic index
        tied = [i for i, r in zip(rows, ratios) if r <= best + PIVOT_TOL * max(1.0, abs(best))]
        leave = min(tied, key=lambda i: basis[i])
        tab[leave] /= tab[leave, entering]
        for i in range(m + 1):
            if i != leave and tab[i, entering] != 0:
                tab[i] -= tab[i, entering] * tab[leave]
        basis[leave] = entering
    else:
        raise ArithmeticError("simplex iteration limit reached")
    x = np.zeros(n + m)
    for i, j in enumerate(basis):
        x[j] = tab[i, -1]
    return x[:n], tab[m, n : n + m].copy(), float(tab[m, -1])


def _minimizer(mat: np.ndarray) -> tuple[np.ndarray, float]:
    """Column mixture ``p`` minimising ``max_i (mat @ p)_i`` and that value."""
    shift = 1.0 - float(mat.min())
    pos = mat + shift
    y, _, total = simplex_max(np.ones(pos.shape[1]), pos, np.ones(pos.shape[0]))
    if total <= 0:
        raise ArithmeticError("degenerate game LP")
    p = np.clip(y / total, 0.0, None)
    p /= p.sum()
    return p, 1.0 / total - shift


def solve_matrix_game(mat) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Row (maximiser) and column (minimiser) strategies of a finite game.

    Returns ``(p_row, p_col, column_value, row_value)``.  The two values are
    computed by independent LPs and differ only by round-off.
    """
    mat = np.asarray(mat, dtype=float)
    if not np.isfinite(mat).all():
        raise ValueError("solve_matrix_game needs a finite matrix")
    p_col, v_col = _minimizer(mat)
    p_row, neg = _minimizer(-mat.T)
    return p_row, p_col, v_col, -neg


def pure_saddles(mat: np.ndarray) -> list[tuple[int, int]]:
    """Cells that are a row minimum and a column maximum, ordered by (column, row)."""
    mat = np.asarray(mat, dtype=float)
    if mat.size == 0:
        return []
    row_min = mat.min(axis=1)
    col_max = mat.max(axis=0)
    cells = [
        (i, j)
        for j in range(mat.shape[1])
        for i in range(mat.shape[0])
        if mat[i, j] == row_min[i] and mat[i, j] == col_max[j]
    ]
    return cells


def solve_zero_sum(matrix: PayoffMatrix) -> Equilibrium:
    mask = matrix.feasible_mask
    if not mask.any():
        raise InfeasibleGameError("game has unbounded value for every monitor choice")
    sub = matrix.feasible_submatrix()
    cols = np.flatnonzero(mask)
    saddles = pure_saddles(sub)
    p_m = np.zeros(len(matrix.monitor_actions))
    p_a = np.zeros(len(matrix.attack_actions))
    if saddles:
        i, j = saddles[0]
        p_a[i] = 1.0
        p_m[cols[j]] = 1.0
        value = adv = float(sub[i, j])
    else:
        p_row, p_col, value, adv = solve_matrix_game(sub)
        p_a[:] = _clean(p_row)
        p_m[cols] = _clean(p_col)
    support_a = tuple(a for a, p in zip(matrix.attack_actions, p_a) if p > PROB_TOL)
    support_m = tuple(m for m, p in zip(matrix.monitor_actions, p_m) if p > PROB_TOL)
    return Equilibrium(
        p_a=p_a,
        p_m=p_m,
        value=float(value),
        is_pure=len(support_a) == 1 and len(support_m) == 1,
        support_a=support_a,
        support_m=support_m,
        adversary_value=float(adv),
        full_matrix_pure=bool(pure_saddles(matrix.entries)),
        feasible_monitors=tuple(matrix.feasible_monitors),
    )


def _clean(p: np.ndarray) -> np.ndarray:
    p = np.where(p > PROB_TOL, p, 0.0)
    return p / p.sum()


def expected_payoff(matrix: PayoffMatrix, p_a, p_m) -> float:
    """``p_a @ J @ p_m``; unbounded as soon as a played cell is unbounded."""
    p_a = _check_distribution(p_a, len(matrix.attack_actions), "p_a")
    p_m = _check_distribution(p_m, len(matrix.monitor_actions), "p_m")
    weight = np.outer(p_a, p_m)
    played = weight > 0
    if np.isinf(matrix.entries[played]).any():
        return math.inf
    return float(np.sum(weight[played] * matrix.entries[played]))


def _check_distribution(p, size: int, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (size,):
        raise ValueError(f"{name} has shape {p.shape}, expected ({size},)")
    if (p < -PROB_TOL).any() or abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"{name} is not a probability vector")
    return np.clip(p, 0.0, None)


def verify_saddle(matrix: PayoffMatrix, eq: Equilibrium, tol: float = SADDLE_TOL) -> bool:
    """No pure deviation of either player gains more than ``tol``."""
    mask = matrix.feasible_mask
    if (eq.p_m[~mask] > 0).any():
        return False
    sub = matrix.feasible_submatrix()
    p_m = eq.p_m[mask]
    value = expected_payoff(matrix, eq.p_a, eq.p_m)
    best_attack = float(np.max(sub @ p_m))
    best_monitor = float(np.min(eq.p_a @ sub))
    return best_attack <= value + tol and best_monitor >= value - tol


# -- file formats ---------------------------------------------------------------------
def _fmt(x: float, digits: int = 6) -> str:
    return "inf" if math.isinf(x) else f"{x:.{digits}g}"


def payoff_to_csv(matrix: PayoffMatrix, digits: int = 6) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if matrix.target is not None:
        buf.write(f"# target {matrix.target}\n")
    w.writerow(["a\\m", *(f"v{m}" for m in matrix.monitor_actions)])
    for a, row in zip(matrix.attack_actions, matrix.entries):
        w.writerow([f"v{a}", *(_fmt(x, digits) for x in row)])
    return buf.getvalue()


def write_payoff_csv(matrix: PayoffMatrix, path, digits: int = 6) -> None:
    Path(path).write_text(payoff_to_csv(matrix, digits))


def _vertex_label(text: str, where: str) -> int:
    s = text.strip()
    if s[:1] in ("v", "V"):
        s = s[1:]
    try:
        v = int(s)
    except ValueError:
        raise PayoffFormatError(f"{where}: expected a vertex label like 'v3', got {text!r}") from None
    if v < 1:
        raise PayoffFormatError(f"{where}: vertex ids are 1-based, got {text!r}")
    return v


def parse_payoff_csv(text: str, source: str = "<csv>") -> PayoffMatrix:
    target = None
    lines = text.splitlines()
    body = []
    for k, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            parts = stripped[1:].split()
            if len(parts) == 2 and parts[0] == "target":
                target = _vertex_label(parts[1], f"{source}: row {k}")
            continue
        body.append((k, line))
    if not body:
        raise PayoffFormatError(f"{source}: no header row")
    hk, header = body[0]
    head = next(csv.reader([header]))
    if len(head) < 2:
        raise PayoffFormatError(f"{source}: row {hk}: header needs at least one monitor column")
    monitors = tuple(
        _vertex_label(h, f"{source}: row {hk}, column {c}") for c, h in enumerate(head[1:], start=2)
    )
    attacks, rows = [], []
    for k, line in body[1:]:
        cells = next(csv.reader([line]))
        if len(cells) != len(head):
            raise PayoffFormatError(
                f"{source}: row {k}: {len(cells)} cells, header has {len(head)}"
            )
        attacks.append(_vertex_label(cells[0], f"{source}: row {k}, column 1"))
        vals = []
        for c, cell in enumerate(cells[1:], start=2):
            s = cell.strip().lower()
            if s in ("inf", "+inf", "infinity", "∞"):
                vals.append(math.inf)
                continue
            try:
                x = float(s)
            except ValueError:
                raise PayoffFormatError(
                    f"{source}: row {k}, column {c}: expected a number or 'inf', got {cell!r}"
                ) from None
            if not math.isfinite(x) or x < 0:
                raise PayoffFormatError(
                    f"{source}: row {k}, column {c}: payoff must be nonnegative, got {cell!r}"
                )
            vals.append(x)
        rows.append(vals)
    if not rows:
        raise PayoffFormatError(f"{source}: no data rows")
    for lbl, items in (("attack", attacks), ("monitor", monitors)):
        if len(set(items)) != len(items):
            raise PayoffFormatError(f"{source}: duplicate {lbl} vertex labels")
    return PayoffMatrix(target, tuple(attacks), monitors, np.array(rows))


def read_payoff_csv(path) -> PayoffMatrix:
    return parse_payoff_csv(Path(path).read_text(), str(path))


def load_table1() -> PayoffMatrix:
    """Published 9x9 payoff matrix for target vertex 5."""
    text = resources.files(__package__).joinpath("data/table1.csv").read_text()
    return parse_payoff_csv(text, "table1.csv")


def write_equilibrium_json(eq: Equilibrium, path, matrix: PayoffMatrix | None = None) -> None:
    Path(path).write_text(json.dumps(eq.to_dict(matrix), indent=2) + "\n")
