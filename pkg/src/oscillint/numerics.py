"""Shared numerical kernels.

Cumulative quadrature on grids, an adaptive embedded Runge-Kutta 4(5)
integrator (Dormand-Prince pair) with cubic-Hermite dense output,
zero-crossing event detection with bisection refinement, escape
(blow-up) detection, and bracketed root refinement.

The integrator is deliberately self-contained: the rest of the library
depends on its exact semantics (dense output shape, dual escape
detection via magnitude threshold or step collapse, events refined on
the dense output), which off-the-shelf solvers do not pin down.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import brentq


class IntegrationError(RuntimeError):
    """Field evaluation failed or the solver could not proceed."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time!r}")
        self.time = time


class RootBracketError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    escape_magnitude: float = 1e8
    root_tol: float = 1e-9

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.rel_tol < 1e-14:
            raise ValueError("rel_tol below achievable double precision")
        if not (self.escape_magnitude > 0 and self.root_tol > 0):
            raise ValueError("escape_magnitude and root_tol must be positive")


@dataclass(frozen=True)
class Grid:
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise ValueError("grid needs at least 2 nodes")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("grid nodes must be finite")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("grid nodes must be strictly increasing")

    @staticmethod
    def uniform(t_start: float, t_end: float, n: int) -> "Grid":
        return Grid(np.linspace(t_start, t_end, n))

    @property
    def span(self) -> tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class Event:
    kind: str  # "zero-crossing" | "escape"
    time: float
    direction: int = 0  # +1 rising, -1 falling (crossings)
    component: int | None = None


@dataclass(frozen=True)
class EventSpec:
    """Watch g(t, y) for sign changes along the solution."""

    fn: Callable[[float, np.ndarray], float]
    direction: int = 0  # 0: both; +1: rising only; -1: falling only
    terminal: bool = False
    kind: str = "zero-crossing"
    component: int | None = None


def zero_crossing(component: int, direction: int = 0, terminal: bool = False) -> EventSpec:
    return EventSpec(
        fn=lambda t, y: y[component],
        direction=direction,
        terminal=terminal,
        component=component,
    )


def _hermite(s: np.ndarray, h: float, y0, y1, f0, f1):
    """Cubic Hermite basis on normalized s in [0,1]."""
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


class CubicHermiteCurve:
    """Piecewise cubic Hermite interpolant with exact nodal derivatives."""

    def __init__(self, ts: np.ndarray, values: np.ndarray, derivs: np.ndarray):
        self.ts = np.asarray(ts, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.derivs = np.asarray(derivs, dtype=float)
        if len(self.ts) != len(self.values) or len(self.ts) != len(self.derivs):
            raise ValueError("mismatched interpolant arrays")

    def __call__(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        idx = np.clip(np.searchsorted(self.ts, t_arr, side="right") - 1, 0, len(self.ts) - 2)
        t0 = self.ts[idx]
        h = self.ts[idx + 1] - t0
        s = (t_arr - t0) / h
        if self.values.ndim == 1:
            out = _hermite(s, h, self.values[idx], self.values[idx + 1],
                           self.derivs[idx], self.derivs[idx + 1])
        else:
            out = _hermite(s[:, None], h[:, None], self.values[idx], self.values[idx + 1],
                           self.derivs[idx], self.derivs[idx + 1])
        return out[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else out

    def rate(self, t):
        """Exact derivative of the piecewise cubic at t."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        idx = np.clip(np.searchsorted(self.ts, t_arr, side="right") - 1, 0, len(self.ts) - 2)
        t0 = self.ts[idx]
        h = self.ts[idx + 1] - t0
        s = (t_arr - t0) / h
        if self.values.ndim != 1:
            s, h = s[:, None], h[:, None]
        y0, y1 = self.values[idx], self.values[idx + 1]
        f0, f1 = self.derivs[idx], self.derivs[idx + 1]
        out = ((6.0 * s * s - 6.0 * s) * (y0 - y1) / h
               + (3.0 * s * s - 4.0 * s + 1.0) * f0
               + (3.0 * s * s - 2.0 * s) * f1)
        return out[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else out


@dataclass
class Trajectory:
    grid: Grid
    states: np.ndarray  # shape (n, dim)
    events: list[Event] = field(default_factory=list)
    derivs: np.ndarray | None = None  # shape (n, dim), for dense output

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float)
        if self.states.ndim == 1:
            self.states = self.states[:, None]
        if len(self.states) != len(self.grid):
            raise ValueError("states length must equal grid length")
        lo, hi = self.grid.span
        for ev in self.events:
            if not (lo <= ev.time <= hi) or not np.isfinite(ev.time):
                raise ValueError("event time outside trajectory span")

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def span(self) -> tuple[float, float]:
        return self.grid.span

    def interpolant(self) -> CubicHermiteCurve:
        if self.derivs is None:
            raise ValueError("trajectory has no stored derivatives for dense output")
        return CubicHermiteCurve(self.grid.nodes, self.states, self.derivs)

    def sample(self, t):
        return self.interpolant()(t)

    def component(self, index: int) -> CubicHermiteCurve:
        if self.derivs is None:
            raise ValueError("trajectory has no stored derivatives for dense output")
        return CubicHermiteCurve(self.grid.nodes, self.states[:, index], self.derivs[:, index])

    def escape_time(self) -> float | None:
        for ev in self.events:
            if ev.kind == "escape":
                return ev.time
        return None


# ---------------------------------------------------------------------------
# Quadrature


def cumulative_integral(values: np.ndarray, grid: Grid, method: str = "trapezoid") -> np.ndarray:
    """Cumulative integral of sampled values along the grid; starts at 0."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise ValueError("values must be sampled on the grid")
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.isfinite(values)))
        raise IntegrationError("non-finite integrand sample", float(grid.nodes[bad]))
    if method == "trapezoid":
        seg = 0.5 * (values[1:] + values[:-1]) * np.diff(grid.nodes)
        return np.concatenate(([0.0], np.cumsum(seg)))
    if method == "simpson":
        return cumulative_simpson(values, x=grid.nodes, initial=0.0)
    raise ValueError(f"unknown quadrature method '{method}'")


def definite_simpson(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                     subintervals: int = 2048) -> float:
    """Composite Simpson for a vectorized integrand on [lo, hi]."""
    if hi <= lo:
        raise ValueError("empty integration interval")
    n = subintervals + (subintervals % 2)  # even number of panels
    ts = np.linspace(lo, hi, n + 1)
    ys = np.asarray(fn(ts), dtype=float)
    h = (hi - lo) / n
    return float(h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-2:2].sum()))


# ---------------------------------------------------------------------------
# Root refinement


def refine_root(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-9) -> float:
    """Bracketed root with |bracket| <= tol (Brent's method)."""
    if hi <= lo:
        raise RootBracketError("empty bracket")
    f_lo = fn(lo)
    f_hi = fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise RootBracketError(f"no sign change on [{lo}, {hi}]")
    return float(brentq(fn, lo, hi, xtol=tol))


def _bisect_event(g: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Plain bisection on the dense output; assumes sign change across [a, b]."""
    ga = g(a)
    if ga == 0.0:
        return a
    for _ in range(128):
        if (b - a) <= tol:
            break
        mid = 0.5 * (a + b)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (ga < 0) == (gm < 0):
            a, ga = mid, gm
        else:
            b = mid
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# Adaptive Dormand-Prince 4(5) with FSAL

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_DP_E = _DP_B5 - _DP_B4

_EVENT_SUBSAMPLES = 6
_MAX_STEPS = 1_000_000
_STEP_COLLAPSE = 1e-12


def _call_field(field_fn, t, y, dim):
    try:
        out = np.asarray(field_fn(t, y), dtype=float)
    except (ValueError, ZeroDivisionError, OverflowError, FloatingPointError):
        return None
    if out.shape != (dim,) or not np.all(np.isfinite(out)):
        return None
    return out


def integrate_ode(
    field_fn: Callable[[float, np.ndarray], np.ndarray],
    y0: Sequence[float],
    span: tuple[float, float],
    tolerances: Tolerances = Tolerances(),
    events: Sequence[EventSpec] = (),
    max_step: float | None = None,
) -> Trajectory:
    """Integrate y' = field(t, y) forward across span.

    Local error per step is held to rel_tol*|y| + abs_tol by the embedded
    4th/5th order pair. Integration ends early with a terminal event, or
    with an escape event once |state| exceeds escape_magnitude or the
    step size collapses below 1e-12 * span width.
    """
    t_a, t_b = float(span[0]), float(span[1])
    if not t_b > t_a:
        raise ValueError("span must satisfy t_a < t_b")
    y = np.asarray(y0, dtype=float).copy()
    if y.ndim == 0:
        y = y[None]
    dim = len(y)
    width = t_b - t_a
    if max_step is None:
        max_step = width / 16.0
    tol = tolerances

    ts = [t_a]
    ys = [y.copy()]
    fs = []
    recorded: list[Event] = []

    f_now = _call_field(field_fn, t_a, y, dim)
    if f_now is None:
        raise IntegrationError("field not evaluable at start", t_a)
    fs.append(f_now.copy())

    if float(np.max(np.abs(y))) > tol.escape_magnitude:
        recorded.append(Event("escape", t_a))
        return Trajectory(Grid(np.array([t_a, t_a + width * 1e-15])),
                          np.array([y, y]), recorded, np.array([f_now, f_now]))

    # initial step heuristic
    scale = tol.abs_tol + tol.rel_tol * np.abs(y)
    d0 = float(np.sqrt(np.mean((y / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f_now / scale) ** 2)))
    h = 0.01 * d0 / d1 if (d0 > 1e-5 and d1 > 1e-5) else width / 100.0
    h = min(h, max_step, width)

    t = t_a
    terminal_hit = False
    k = np.empty((7, dim))

    def finish():
        grid = Grid(np.asarray(ts))
        traj = Trajectory(grid, np.asarray(ys), recorded, np.asarray(fs))
        return traj

    for _ in range(_MAX_STEPS):
        # the sliver guard keeps a 1-ulp remainder from looking like collapse
        if t >= t_b - 1e-13 * width or terminal_hit:
            break
        h = min(h, t_b - t)
        if h < _STEP_COLLAPSE * width:
            recorded.append(Event("escape", t))
            break

        k[0] = f_now
        failed_stage = False
        for i in range(1, 7):
            yi = y + h * (_DP_A[i] @ k[:i])
            ki = _call_field(field_fn, t + _DP_C[i] * h, yi, dim)
            if ki is None:
                failed_stage = True
                break
            k[i] = ki
        if failed_stage:
            h *= 0.25
            continue

        y_new = y + h * (_DP_B5 @ k)  # same as stage-6 state (FSAL), kept explicit
        err_vec = h * (_DP_E @ k)
        scale = tol.abs_tol + tol.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if not np.isfinite(err):
            h *= 0.25
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            continue

        # accepted
        t_new = t + h
        if t_b - t_new < 1e-12 * width:
            t_new = t_b
        # FSAL stage is field(t_new, y_new); copy, k is overwritten on retries
        f_new = k[6].copy()
        curve_y0, curve_y1 = y.copy(), y_new.copy()
        curve_f0, curve_f1 = k[0].copy(), f_new.copy()
        hh = h

        def dense(tq, y0=curve_y0, y1=curve_y1, f0=curve_f0, f1=curve_f1, ta=t, hseg=hh):
            s = (tq - ta) / hseg
            return _hermite(s, hseg, y0, y1, f0, f1)

        # event scan on the dense output
        step_events: list[Event] = []
        cut_time: float | None = None
        for spec in events:
            samples = np.linspace(t, t_new, _EVENT_SUBSAMPLES + 1)
            gs = [spec.fn(tq, dense(tq)) for tq in samples]
            for j in range(_EVENT_SUBSAMPLES):
                ga, gb = gs[j], gs[j + 1]
                if ga == 0.0 or not ((ga < 0 < gb) or (gb < 0 < ga) or (ga != 0.0 and gb == 0.0)):
                    continue
                direction = 1 if gb > ga else -1
                if spec.direction != 0 and direction != spec.direction:
                    continue
                te = _bisect_event(lambda tq: spec.fn(tq, dense(tq)),
                                   samples[j], samples[j + 1], tol.root_tol)
                step_events.append(Event(spec.kind, float(te), direction, spec.component))
                if spec.terminal and (cut_time is None or te < cut_time):
                    cut_time = float(te)
        step_events.sort(key=lambda ev: ev.time)

        if cut_time is not None:
            recorded.extend(ev for ev in step_events if ev.time <= cut_time)
            y_cut = dense(cut_time)
            f_cut = _call_field(field_fn, cut_time, y_cut, dim)
            if cut_time > t:
                ts.append(cut_time)
                ys.append(y_cut)
                fs.append(f_cut if f_cut is not None else dense(cut_time))
            terminal_hit = True
            break
        recorded.extend(step_events)

        # escape by magnitude, refined on the dense output
        if float(np.max(np.abs(y_new))) > tol.escape_magnitude:
            g_esc = lambda tq: float(np.max(np.abs(dense(tq)))) - tol.escape_magnitude
            te = _bisect_event(g_esc, t, t_new, tol.root_tol) if g_esc(t) < 0 else t
            y_esc = dense(te)
            if te > t:
                ts.append(te)
                ys.append(y_esc)
                f_esc = _call_field(field_fn, te, y_esc, dim)
                fs.append(f_esc if f_esc is not None else fs[-1])
            recorded.append(Event("escape", float(te)))
            break

        ts.append(t_new)
        ys.append(y_new.copy())
        fs.append(f_new.copy())
        t, y, f_now = t_new, y_new, f_new

        factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h = min(h * factor, max_step)
    else:
        raise IntegrationError("step budget exhausted", t)

    if len(ts) == 1:
        # terminal/escape event at the very start; emit a degenerate short span
        ts.append(t_a + max(width * 1e-15, 1e-300))
        ys.append(ys[0].copy())
        fs.append(fs[0].copy())
    return finish()
