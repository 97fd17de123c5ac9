"""Decision procedures for oscillation and non-oscillation on a horizon.

Four families of checks live here:

* a polar-angle test for homogeneous systems: zeros of phi are crossings of
  the phase angle through the vertical lines, so interval oscillation reduces
  to how far the angle descends,
* a feasibility scan for the shift parameter lam that certifies
  non-oscillation of a forced system from its homogeneous companion,
* a witness search that certifies oscillation from paired sign windows of
  the shifted forcing plus interval oscillation of the companion,
* a variational test for undamped second-order equations built on the
  quadratic functional of a test function over sign windows of the forcing.

Every verdict is horizon-qualified: "oscillatory" or "non_oscillatory" means
the relevant conditions were verified on [t0, T_max], not proved for all time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Sequence

import numpy as np

from .expr import (
    Call,
    Constant,
    Expr,
    Mul,
    Sub,
    TimeVar,
    compile_scalar,
    differentiate,
    eval_expr,
    sample,
)
from .numerics import (
    EventSpec,
    Grid,
    Tolerances,
    definite_simpson,
    integrate_ode,
    refine_root,
)
from .transform import (
    DEFAULT_GRID_NODES,
    AlphaTrace,
    SecondOrderSpec,
    SystemSpec,
    alpha_lambda,
)

ANGLE_SLACK = 1e-6
SIGN_SLACK = 1e-12
FUNCTIONAL_SLACK = 1e-9
DEFAULT_SCAN_POINTS = 8
DEFAULT_LAMBDA_POINTS = 41

OSCILLATORY = "oscillatory"
NON_OSCILLATORY = "non_oscillatory"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class Verdict:
    outcome: str
    horizon: tuple[float, float]
    evidence: dict = dataclass_field(default_factory=dict)
    notes: str = ""

    def __post_init__(self):
        if self.outcome not in (OSCILLATORY, NON_OSCILLATORY, INCONCLUSIVE):
            raise ValueError(f"unknown outcome '{self.outcome}'")
        if self.outcome != INCONCLUSIVE and not self.evidence:
            raise ValueError("decisive verdicts must carry evidence")

    def decisive(self) -> bool:
        return self.outcome != INCONCLUSIVE


@dataclass(frozen=True)
class IntervalWitness:
    """Two ordered intervals plus the shift parameter that make the
    oscillation certificate work beyond some reference time."""

    s1: float
    t1: float
    s2: float
    t2: float
    lam: float
    sign_margins: tuple[float, float, float, float]
    osc_margins: tuple[float, float]

    def __post_init__(self):
        if not (self.s1 < self.t1 <= self.s2 < self.t2):
            raise ValueError("witness intervals must satisfy s1 < t1 <= s2 < t2")

    def intervals(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (self.s1, self.t1), (self.s2, self.t2)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """C1 bridge vanishing at both interval endpoints, not identically zero."""

    __test__ = False  # not a pytest case

    u: Expr
    interval: tuple[float, float]

    def __post_init__(self):
        lo, hi = float(self.interval[0]), float(self.interval[1])
        if not lo < hi:
            raise ValueError("interval must be increasing")
        object.__setattr__(self, "interval", (lo, hi))
        if abs(eval_expr(self.u, lo)) > 1e-9 or abs(eval_expr(self.u, hi)) > 1e-9:
            raise ValueError("test function must vanish at both endpoints")
        probe = np.linspace(lo, hi, 33)
        if np.max(np.abs(sample(self.u, probe))) <= 1e-12:
            raise ValueError("test function must not vanish identically")


def half_sine_bridge(lo: float, hi: float) -> TestFunction:
    """Default test function sin(pi (t - lo) / (hi - lo)) on [lo, hi]."""
    length = hi - lo
    u = Call("sin", Mul(Constant(math.pi / length), Sub(TimeVar(), Constant(lo))))
    return TestFunction(u=u, interval=(lo, hi))


# ---------------------------------------------------------------------------
# Polar angle machinery


def prufer_angle_field(sys: SystemSpec) -> Callable[[float, np.ndarray], np.ndarray]:
    """Angle equation of the homogeneous companion: phi = rho cos(theta),
    psi = rho sin(theta) gives theta' = r cos^2 + (s - p) sin cos - q sin^2."""
    p_ = compile_scalar(sys.p)
    q_ = compile_scalar(sys.q)
    r_ = compile_scalar(sys.r)
    s_ = compile_scalar(sys.s)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        c = math.cos(y[0])
        s_val = math.sin(y[0])
        return np.array([r_(t) * c * c + (s_(t) - p_(t)) * s_val * c
                         - q_(t) * s_val * s_val])

    return rhs


def _q_sign_violation(sys: SystemSpec, lo: float, hi: float,
                      nodes: int = 513) -> float | None:
    ts = np.linspace(lo, hi, nodes)
    q_vals = sample(sys.q, ts)
    bad = q_vals < -SIGN_SLACK
    if np.any(bad):
        return float(ts[int(np.argmax(bad))])
    return None


def angle_line_crossings(sys: SystemSpec, span: tuple[float, float],
                         theta0: float = math.pi / 2,
                         tol: Tolerances = Tolerances()) -> list[float]:
    """Times where the phase angle crosses a vertical line theta = pi/2 - m pi,
    i.e. where the first component of the matching solution vanishes with a
    sign change."""
    spec = EventSpec(fn=lambda t, y: math.cos(y[0]), kind="angle-line")
    traj = integrate_ode(prufer_angle_field(sys), [theta0], span, tol, events=[spec])
    times = [ev.time for ev in traj.events if ev.kind == "angle-line"]
    # collapse numerically duplicated detections of one crossing
    width = span[1] - span[0]
    merged: list[float] = []
    for t in times:
        if merged and t - merged[-1] < 1e-7 * width:
            continue
        merged.append(t)
    if not merged:
        return merged
    # an angle grazing the line produces detections out of 1e-16 noise; keep
    # only crossings where cos(theta) flips sign with genuine magnitude
    curve = traj.component(0)
    delta = 1e-7 * width
    confirmed: list[float] = []
    for t in merged:
        left = math.cos(float(curve(max(t - delta, span[0]))))
        right = math.cos(float(curve(min(t + delta, span[1]))))
        if left * right < 0.0 and min(abs(left), abs(right)) > 1e-12:
            confirmed.append(t)
    return confirmed


def _angle_descent(sys: SystemSpec, lo: float, hi: float,
                   tol: Tolerances) -> float:
    traj = integrate_ode(prufer_angle_field(sys), [math.pi / 2], (lo, hi), tol)
    return math.pi / 2 - float(traj.states[-1, 0])


def interval_oscillation_test(sys: SystemSpec, interval: tuple[float, float],
                              tol: Tolerances = Tolerances()) -> Verdict:
    """Does every solution of the homogeneous companion vanish on the
    closed interval?

    The solution vanishing at the left endpoint starts on a vertical line;
    with q >= 0 the angle can only cross those lines downward, and the scalar
    angle flow preserves order, so it is enough to check that this extremal
    angle descends at least pi by the right endpoint.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError("interval must be increasing")
    bad_t = _q_sign_violation(sys, lo, hi)
    if bad_t is not None:
        return Verdict(INCONCLUSIVE, (lo, hi),
                       notes=f"coupling coefficient q is negative at t = {bad_t:.6g}; "
                             "the angle test needs q >= 0")
    descent = _angle_descent(sys, lo, hi, tol)
    margin = descent - math.pi
    evidence = {"descent": descent, "margin": margin, "interval": (lo, hi)}
    if descent >= math.pi - ANGLE_SLACK:
        return Verdict(OSCILLATORY, (lo, hi), evidence)
    return Verdict(NON_OSCILLATORY, (lo, hi), evidence)


def horizon_nonoscillation_test(sys: SystemSpec, horizon: tuple[float, float],
                                final_fraction: float = 0.5,
                                persistence_window: float | None = None,
                                tol: Tolerances = Tolerances()) -> Verdict:
    """Classify the homogeneous companion over the whole horizon.

    non_oscillatory when no angle-line crossing happens in the trailing
    fraction of the horizon; oscillatory when crossings recur in every window
    of the persistence width; inconclusive between the two.
    """
    lo, hi = float(horizon[0]), float(horizon[1])
    bad_t = _q_sign_violation(sys, lo, hi)
    if bad_t is not None:
        return Verdict(INCONCLUSIVE, (lo, hi),
                       notes=f"coupling coefficient q is negative at t = {bad_t:.6g}; "
                             "the angle test needs q >= 0")
    width = hi - lo
    if persistence_window is None:
        persistence_window = final_fraction * width / 2.0
    crossings = angle_line_crossings(sys, (lo, hi), tol=tol)
    tail_start = hi - final_fraction * width
    tail = [t for t in crossings if t >= tail_start]
    fenced = [lo] + crossings + [hi]
    max_gap = float(np.max(np.diff(fenced))) if len(fenced) > 1 else width
    evidence = {"crossings": crossings, "tail_start": tail_start,
                "max_gap": max_gap, "persistence_window": persistence_window}
    if not tail:
        return Verdict(NON_OSCILLATORY, (lo, hi), evidence)
    if max_gap <= persistence_window:
        return Verdict(OSCILLATORY, (lo, hi), evidence)
    return Verdict(INCONCLUSIVE, (lo, hi), evidence,
                   notes="zeros neither vanish in the trailing window nor recur "
                         "in every persistence window")


# ---------------------------------------------------------------------------
# Shift-parameter feasibility


def lambda_feasibility(sys: SystemSpec, grid: Grid,
                       base_trace: AlphaTrace | None = None
                       ) -> tuple[float, float] | None:
    """Intersection over grid nodes of the two affine constraints on lam
    with [0, inf): alpha_lam >= 0 and r alpha_lam + g >= 0.

    alpha_lam = growth * lam + alpha_0 is affine in lam with positive slope,
    so each node contributes one lower bound from the first constraint and a
    single-signed bound from the second depending on sign(r).  One pass
    suffices; returns None when the interval is empty.
    """
    if base_trace is None:
        base_trace = alpha_lambda(sys, 0.0, grid)
    ts = grid.nodes
    growth = base_trace.growth
    alpha0 = base_trace.alpha
    r_vals = sample(sys.r, ts)
    g_vals = sample(sys.g, ts)

    lam_lo = 0.0
    lam_hi = math.inf

    # first constraint: growth * lam + alpha0 >= 0, growth > 0
    lam_lo = max(lam_lo, float(np.max(-(alpha0 + SIGN_SLACK) / growth)))

    # second constraint: (r growth) lam + (r alpha0 + g) >= 0
    coef = r_vals * growth
    offset = r_vals * alpha0 + g_vals + SIGN_SLACK
    pos = coef > SIGN_SLACK
    neg = coef < -SIGN_SLACK
    flat = ~pos & ~neg
    if np.any(pos):
        lam_lo = max(lam_lo, float(np.max(-offset[pos] / coef[pos])))
    if np.any(neg):
        lam_hi = min(lam_hi, float(np.min(-offset[neg] / coef[neg])))
    if np.any(flat) and np.min(offset[flat]) < 0.0:
        return None

    if lam_lo > lam_hi:
        return None
    return lam_lo, lam_hi


def check_nonoscillation(sys: SystemSpec, horizon: tuple[float, float],
                         grid_nodes: int = DEFAULT_GRID_NODES,
                         tol: Tolerances = Tolerances()) -> Verdict:
    """Certify non-oscillation of the forced system on the horizon.

    Needs q >= 0, a feasible shift parameter lam >= 0, and a non-oscillatory
    homogeneous companion; each requirement that fails makes the verdict
    inconclusive (the criterion is one-sided).
    """
    lo, hi = float(horizon[0]), float(horizon[1])
    grid = Grid.uniform(lo, hi, grid_nodes)
    bad_t = _q_sign_violation(sys, lo, hi)
    if bad_t is not None:
        return Verdict(INCONCLUSIVE, (lo, hi),
                       notes=f"coupling coefficient q is negative at t = {bad_t:.6g}")
    feasible = lambda_feasibility(sys, grid)
    if feasible is None:
        return Verdict(INCONCLUSIVE, (lo, hi),
                       notes="no nonnegative shift parameter satisfies both "
                             "sign constraints on the grid")
    homogeneous = horizon_nonoscillation_test(sys.homogeneous(), (lo, hi), tol=tol)
    if homogeneous.outcome != NON_OSCILLATORY:
        return Verdict(INCONCLUSIVE, (lo, hi),
                       evidence={"lambda_interval": feasible,
                                 "homogeneous": homogeneous.outcome},
                       notes="homogeneous companion is not non-oscillatory "
                             "on the horizon")
    lam_lo, lam_hi = feasible
    trace = alpha_lambda(sys, lam_lo, grid)
    margins = {
        "alpha_min": float(np.min(trace.alpha)),
        "forcing_min": float(np.min(trace.g_lambda)),
    }
    evidence = {"lambda_witness": lam_lo, "lambda_interval": (lam_lo, lam_hi),
                "margins": margins, "homogeneous": homogeneous.evidence}
    return Verdict(NON_OSCILLATORY, (lo, hi), evidence)


# ---------------------------------------------------------------------------
# Sign windows


def sign_windows(values: np.ndarray, grid: Grid, required_sign: int,
                 slack: float = SIGN_SLACK) -> list[tuple[float, float]]:
    """Maximal closed grid intervals where sign * values >= -slack.

    Single-node runs are dropped; they cannot carry an interval condition.
    """
    if required_sign not in (-1, 1):
        raise ValueError("required_sign must be +1 or -1")
    values = np.asarray(values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise ValueError("values must be sampled on the grid")
    mask = required_sign * values >= -slack
    windows = []
    for i, j in _runs(mask):
        if j > i:
            windows.append((float(grid.nodes[i]), float(grid.nodes[j])))
    return windows


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    runs = []
    start = None
    for idx, ok in enumerate(mask):
        if ok and start is None:
            start = idx
        elif not ok and start is not None:
            runs.append((start, idx - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def _refined_windows(margin_fn: Callable[[np.ndarray], np.ndarray], grid: Grid,
                     slack: float = SIGN_SLACK,
                     min_width: float | None = None) -> list[tuple[float, float]]:
    """Sign windows of a continuous margin with endpoints sharpened off-grid.

    Grid nodes rarely hit the true sign-change times; interval tests need the
    full window (a half period, say), so each boundary adjacent to a violating
    node is pushed to the bracketed root of margin + slack.
    """
    nodes = grid.nodes
    vals = np.asarray(margin_fn(nodes), dtype=float)
    mask = vals >= -slack
    if min_width is None:
        min_width = 1e-9 * (nodes[-1] - nodes[0])

    def scalar(t: float) -> float:
        return float(np.atleast_1d(margin_fn(np.array([t])))[0]) + slack

    windows = []
    for i, j in _runs(mask):
        lo = float(nodes[i])
        hi = float(nodes[j])
        if i > 0:
            lo = refine_root(scalar, float(nodes[i - 1]), lo, tol=1e-13)
        if j < len(nodes) - 1:
            hi = refine_root(scalar, hi, float(nodes[j + 1]), tol=1e-13)
        if hi - lo > min_width:
            windows.append((lo, hi))
    return windows


def _intersect_windows(xs: list[tuple[float, float]],
                       ys: list[tuple[float, float]],
                       min_width: float) -> list[tuple[float, float]]:
    out = []
    for a0, a1 in xs:
        for b0, b1 in ys:
            lo, hi = max(a0, b0), min(a1, b1)
            if hi - lo > min_width:
                out.append((lo, hi))
    out.sort()
    return out


def _clip_windows(windows: list[tuple[float, float]], start: float,
                  min_width: float) -> list[tuple[float, float]]:
    out = []
    for lo, hi in windows:
        lo = max(lo, start)
        if hi - lo > min_width:
            out.append((lo, hi))
    return out


# ---------------------------------------------------------------------------
# Oscillation witness search


def _shifted_trace(base: AlphaTrace, lam: float, p_vals: np.ndarray,
                   f_vals: np.ndarray, r_vals: np.ndarray,
                   g_vals: np.ndarray) -> AlphaTrace:
    # alpha is affine in lam with slope growth; rebuild the trace arrays
    # without repeating the quadrature
    if lam == base.lam:
        return base
    alpha = base.alpha + (lam - base.lam) * base.growth
    return AlphaTrace(lam=lam, grid=base.grid, growth=base.growth, alpha=alpha,
                      g_lambda=r_vals * alpha + g_vals,
                      alpha_rate=p_vals * alpha + f_vals,
                      growth_rate=base.growth_rate, system=base.system)


def _window_oscillates(sys_h: SystemSpec, window: tuple[float, float],
                       cache: dict, tol: Tolerances) -> tuple[bool, float]:
    key = (round(window[0], 12), round(window[1], 12))
    if key not in cache:
        descent = _angle_descent(sys_h, window[0], window[1], tol)
        cache[key] = (descent >= math.pi - ANGLE_SLACK, descent)
    return cache[key]


def _window_margin(margin_fn, lo: float, hi: float) -> float:
    ts = np.linspace(lo, hi, 65)
    return float(np.min(margin_fn(ts)))


def find_interval_witness(sys: SystemSpec, T: float,
                          lambda_grid: Sequence[float],
                          horizon: tuple[float, float],
                          grid_nodes: int = DEFAULT_GRID_NODES,
                          tol: Tolerances = Tolerances(),
                          base_trace: AlphaTrace | None = None,
                          angle_cache: dict | None = None
                          ) -> IntervalWitness | None:
    """First witness of paired sign windows beyond T, scanning the shift
    parameter grid.

    For each lam, collect windows where alpha_lam and the shifted forcing are
    both nonpositive (first interval) and both nonnegative (second), order
    candidate pairs earliest-first, and keep the first pair on which the
    homogeneous companion oscillates.  Assumes q >= 0 on the horizon.
    """
    lo, hi = float(horizon[0]), float(horizon[1])
    if not lo <= T < hi:
        raise ValueError("reference time must lie inside the horizon")
    grid = Grid.uniform(lo, hi, grid_nodes)
    if base_trace is None:
        base_trace = alpha_lambda(sys, 0.0, grid)
    ts = grid.nodes
    p_vals = sample(sys.p, ts)
    f_vals = sample(sys.f, ts)
    r_vals = sample(sys.r, ts)
    g_vals = sample(sys.g, ts)
    sys_h = sys.homogeneous()
    if angle_cache is None:
        angle_cache = {}
    min_width = 1e-9 * (hi - lo)

    lams = sorted(dict.fromkeys(float(v) for v in lambda_grid), key=abs)
    for lam in lams:
        trace = _shifted_trace(base_trace, lam, p_vals, f_vals, r_vals, g_vals)

        def alpha_margin(t, sign):
            return sign * np.atleast_1d(trace.alpha_at(t))

        def forcing_margin(t, sign):
            return sign * np.atleast_1d(trace.g_lambda_at(t))

        sided: dict[int, list[tuple[float, float]]] = {}
        for sign in (-1, 1):
            a_windows = _refined_windows(lambda t, s=sign: alpha_margin(t, s), grid)
            f_windows = _refined_windows(lambda t, s=sign: forcing_margin(t, s), grid)
            merged = _intersect_windows(a_windows, f_windows, min_width)
            sided[sign] = _clip_windows(merged, T, min_width)

        candidates = []
        for w1 in sided[-1]:
            for w2 in sided[1]:
                if w2[1] <= w1[0]:
                    continue
                if w1[1] <= w2[0] + 1e-9:
                    pair = (w1[0], w1[1], max(w2[0], w1[1]), w2[1])
                else:
                    shared_lo = max(w1[0], w2[0])
                    shared_hi = min(w1[1], w2[1])
                    mid = 0.5 * (shared_lo + shared_hi)
                    pair = (w1[0], mid, mid, w2[1])
                s1, t1, s2, t2 = pair
                if t1 - s1 > min_width and t2 - s2 > min_width and t1 <= s2:
                    candidates.append(pair)
        candidates.sort()

        for s1, t1, s2, t2 in candidates:
            ok1, descent1 = _window_oscillates(sys_h, (s1, t1), angle_cache, tol)
            if not ok1:
                continue
            ok2, descent2 = _window_oscillates(sys_h, (s2, t2), angle_cache, tol)
            if not ok2:
                continue
            margins = (
                _window_margin(lambda t: alpha_margin(t, -1), s1, t1),
                _window_margin(lambda t: forcing_margin(t, -1), s1, t1),
                _window_margin(lambda t: alpha_margin(t, 1), s2, t2),
                _window_margin(lambda t: forcing_margin(t, 1), s2, t2),
            )
            return IntervalWitness(s1=s1, t1=t1, s2=s2, t2=t2, lam=lam,
                                   sign_margins=margins,
                                   osc_margins=(descent1 - math.pi,
                                                descent2 - math.pi))
    return None


def default_lambda_grid(sys: SystemSpec, grid: Grid,
                        base_trace: AlphaTrace | None = None,
                        points: int = DEFAULT_LAMBDA_POINTS) -> list[float]:
    """Symmetric lam grid whose span makes the affine constraints attainable,
    always containing 0."""
    if base_trace is None:
        base_trace = alpha_lambda(sys, 0.0, grid)
    ts = grid.nodes
    r_vals = sample(sys.r, ts)
    g_vals = sample(sys.g, ts)
    denom = float(np.max(np.abs(r_vals * base_trace.growth)))
    numer = float(np.max(np.abs(g_vals)))
    span = 1.0
    if denom > 1e-12:
        span = max(1.0, min(1e6, numer / denom))
    lams = np.linspace(-span, span, points)
    if not np.any(lams == 0.0):
        lams = np.append(lams, 0.0)
    return [float(v) for v in lams]


def check_oscillation(sys: SystemSpec, horizon: tuple[float, float],
                      scan: Sequence[float] | None = None,
                      lambda_grid: Sequence[float] | None = None,
                      grid_nodes: int = DEFAULT_GRID_NODES,
                      periodic: float | None = None,
                      tol: Tolerances = Tolerances()) -> Verdict:
    """Certify oscillation: a witness must exist beyond every scanned
    reference time.

    The scan defaults to 8 reference times over the first half of the
    horizon, or over one period when periodic is given (periodicity then
    extends the evidence to all later reference times).  Failure of this
    sufficient condition proves nothing, so the negative outcome is always
    inconclusive.
    """
    lo, hi = float(horizon[0]), float(horizon[1])
    bad_t = _q_sign_violation(sys, lo, hi)
    if bad_t is not None:
        return Verdict(INCONCLUSIVE, (lo, hi),
                       notes=f"coupling coefficient q is negative at t = {bad_t:.6g}")
    if scan is None:
        reach = periodic if periodic is not None else (hi - lo) / 2.0
        reach = min(reach, hi - lo)
        scan = np.linspace(lo, lo + reach, DEFAULT_SCAN_POINTS, endpoint=False)
    grid = Grid.uniform(lo, hi, grid_nodes)
    base_trace = alpha_lambda(sys, 0.0, grid)
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(sys, grid, base_trace)

    angle_cache: dict = {}
    witnesses = []
    for T in scan:
        witness = find_interval_witness(sys, float(T), lambda_grid, (lo, hi),
                                        grid_nodes=grid_nodes, tol=tol,
                                        base_trace=base_trace,
                                        angle_cache=angle_cache)
        if witness is None:
            return Verdict(INCONCLUSIVE, (lo, hi),
                           evidence={"witnesses": witnesses,
                                     "failed_at": float(T)},
                           notes=f"no interval witness beyond T = {float(T):.6g}")
        witnesses.append((float(T), witness))
    notes = ""
    if periodic is not None:
        notes = (f"witnesses verified over one period ({periodic:g}); "
                 "periodicity extends them to all later reference times")
    return Verdict(OSCILLATORY, (lo, hi),
                   evidence={"witnesses": witnesses,
                             "lambda_grid_size": len(list(lambda_grid))},
                   notes=notes)


# ---------------------------------------------------------------------------
# Variational criterion for undamped second-order equations


def variational_functional(a: Expr, c: Expr, u: TestFunction,
                           subintervals: int = 2048) -> float:
    """Integral of c u^2 - a u'^2 over the test interval, u' symbolic."""
    du = differentiate(u.u)
    lo, hi = u.interval

    def integrand(ts: np.ndarray) -> np.ndarray:
        return (sample(c, ts) * sample(u.u, ts) ** 2
                - sample(a, ts) * sample(du, ts) ** 2)

    return definite_simpson(integrand, lo, hi, subintervals=subintervals)


def check_undamped_equation(eq: SecondOrderSpec, horizon: tuple[float, float],
                            test_function_factory: Callable[[float, float], TestFunction] | None = None,
                            scan: Sequence[float] | None = None,
                            grid_nodes: int = DEFAULT_GRID_NODES,
                            functional_slack: float = FUNCTIONAL_SLACK) -> Verdict:
    """Variational oscillation test for (a phi')' + c phi = d.

    For every scanned reference time there must be a window with d <= 0
    followed by one with d >= 0 on which the functional of a test function is
    nonnegative.  Requires a genuinely undamped equation (b identically 0).
    """
    lo, hi = float(horizon[0]), float(horizon[1])
    probe = np.linspace(lo, hi, 513)
    b_vals = sample(eq.b, probe)
    if np.max(np.abs(b_vals)) > SIGN_SLACK:
        bad = float(probe[int(np.argmax(np.abs(b_vals) > SIGN_SLACK))])
        return Verdict(INCONCLUSIVE, (lo, hi),
                       notes=f"damping coefficient is nonzero at t = {bad:.6g}; "
                             "this test needs b identically 0")
    if scan is None:
        scan = np.linspace(lo, lo + (hi - lo) / 2.0, DEFAULT_SCAN_POINTS,
                           endpoint=False)
    if test_function_factory is None:
        test_function_factory = half_sine_bridge
    grid = Grid.uniform(lo, hi, grid_nodes)
    min_width = 1e-9 * (hi - lo)

    def margin(sign):
        return lambda ts: sign * sample(eq.d, np.asarray(ts, dtype=float))

    neg_windows = _refined_windows(margin(-1), grid)
    pos_windows = _refined_windows(margin(1), grid)

    functional_cache: dict = {}

    def functional_on(window: tuple[float, float]) -> float:
        key = (round(window[0], 12), round(window[1], 12))
        if key not in functional_cache:
            u = test_function_factory(window[0], window[1])
            functional_cache[key] = variational_functional(eq.a, eq.c, u)
        return functional_cache[key]

    records = []
    for T in scan:
        first = _clip_windows(neg_windows, float(T), min_width)
        second = _clip_windows(pos_windows, float(T), min_width)
        found = None
        candidates = []
        for w1 in first:
            for w2 in second:
                if w2[1] <= w1[0]:
                    continue
                if w1[1] <= w2[0] + 1e-9:
                    pair = (w1[0], w1[1], max(w2[0], w1[1]), w2[1])
                else:
                    shared_lo = max(w1[0], w2[0])
                    shared_hi = min(w1[1], w2[1])
                    mid = 0.5 * (shared_lo + shared_hi)
                    pair = (w1[0], mid, mid, w2[1])
                s1, t1, s2, t2 = pair
                if t1 - s1 > min_width and t2 - s2 > min_width and t1 <= s2:
                    candidates.append(pair)
        candidates.sort()
        for s1, t1, s2, t2 in candidates:
            j1 = functional_on((s1, t1))
            if j1 < -functional_slack:
                continue
            j2 = functional_on((s2, t2))
            if j2 < -functional_slack:
                continue
            found = {"T": float(T), "windows": ((s1, t1), (s2, t2)),
                     "functionals": (j1, j2)}
            break
        if found is None:
            return Verdict(INCONCLUSIVE, (lo, hi),
                           evidence={"records": records, "failed_at": float(T)},
                           notes=f"no admissible window pair beyond T = {float(T):.6g} "
                                 "with nonnegative functionals")
        records.append(found)
    return Verdict(OSCILLATORY, (lo, hi), evidence={"records": records})
