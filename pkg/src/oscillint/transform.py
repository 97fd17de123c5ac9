"""Structural transforms between problem formulations.

Three changes of variables connect the objects this package works with:

* a second-order equation (a(t) phi')' + b(t) phi' + c(t) phi = d(t) becomes
  a first-order 2x2 system via psi = a(t) phi',
* a forced system is shifted so that all forcing moves into the second
  equation, at the price of a free parameter ``lam`` (the shift trace),
* a 2x2 linear system corresponds to a scalar quadratic (Riccati) equation
  through y = psi / phi, in both directions.

Shift traces are computed by cumulative quadrature on a fixed grid and wrapped
in cubic Hermite interpolants whose nodal derivatives are exact (the integrand
itself), so evaluation between nodes stays at quadrature accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .expr import Constant, Div, Expr, Negate, compile_scalar, contains_t, eval_expr, sample
from .numerics import CubicHermiteCurve, Grid, Trajectory, cumulative_integral

DEFAULT_GRID_NODES = 2048


class TransformError(ValueError):
    """A change of variables is undefined for the given data."""


def _negated(e: Expr) -> Expr:
    if isinstance(e, Constant):
        return Constant(-e.value)
    if isinstance(e, Negate):
        return e.arg
    return Negate(e)


def _reciprocal(e: Expr) -> Expr:
    if isinstance(e, Constant):
        if e.value == 0.0:
            raise TransformError("cannot divide by the zero coefficient")
        return Constant(1.0 / e.value)
    return Div(Constant(1.0), e)


def _quotient(num: Expr, den: Expr) -> Expr:
    if isinstance(num, Constant) and num.value == 0.0:
        return Constant(0.0)
    if isinstance(den, Constant):
        if den.value == 1.0:
            return num
        if den.value == 0.0:
            raise TransformError("cannot divide by the zero coefficient")
    return Div(num, den)


@dataclass(frozen=True)
class SystemSpec:
    """Coefficients of phi' = p phi + q psi + f, psi' = r phi + s psi + g."""

    p: Expr
    q: Expr
    r: Expr
    s: Expr
    f: Expr
    g: Expr
    t0: float = 0.0

    def coefficients(self) -> dict[str, Expr]:
        return {"p": self.p, "q": self.q, "r": self.r, "s": self.s,
                "f": self.f, "g": self.g}

    def validate_on(self, grid: Grid) -> None:
        """Eagerly evaluate every coefficient on the grid; raises on failure."""
        for name, e in self.coefficients().items():
            try:
                sample(e, grid.nodes)
            except ValueError as exc:
                raise TransformError(f"coefficient {name} not evaluable: {exc}") from exc

    def homogeneous(self) -> "SystemSpec":
        return SystemSpec(self.p, self.q, self.r, self.s,
                          Constant(0.0), Constant(0.0), self.t0)

    def is_forced(self) -> bool:
        for e in (self.f, self.g):
            if contains_t(e) or eval_expr(e, self.t0) != 0.0:
                return True
        return False

    def field(self) -> Callable[[float, np.ndarray], np.ndarray]:
        p_ = compile_scalar(self.p)
        q_ = compile_scalar(self.q)
        r_ = compile_scalar(self.r)
        s_ = compile_scalar(self.s)
        f_ = compile_scalar(self.f)
        g_ = compile_scalar(self.g)

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            phi, psi = y[0], y[1]
            return np.array([p_(t) * phi + q_(t) * psi + f_(t),
                             r_(t) * phi + s_(t) * psi + g_(t)])

        return rhs


@dataclass(frozen=True)
class SecondOrderSpec:
    """Coefficients of (a(t) phi')' + b(t) phi' + c(t) phi = d(t), a > 0."""

    a: Expr
    b: Expr
    c: Expr
    d: Expr
    t0: float = 0.0

    def validate_on(self, grid: Grid) -> None:
        try:
            a_vals = sample(self.a, grid.nodes)
        except ValueError as exc:
            raise TransformError(f"leading coefficient not evaluable: {exc}") from exc
        if np.any(a_vals <= 0.0):
            bad = float(grid.nodes[int(np.argmax(a_vals <= 0.0))])
            raise TransformError(f"leading coefficient must stay positive, fails at t = {bad:g}")
        for name in ("b", "c", "d"):
            try:
                sample(getattr(self, name), grid.nodes)
            except ValueError as exc:
                raise TransformError(f"coefficient {name} not evaluable: {exc}") from exc


@dataclass(frozen=True, eq=False)
class AlphaTrace:
    """Shift trace for one value of lam.

    growth holds exp of the cumulative integral of p; alpha the shifted-forcing
    primitive growth * (lam + integral of f / growth); g_lambda the resulting
    second-equation forcing r * alpha + g.  alpha is affine in lam with slope
    growth, which feasibility scans exploit.
    """

    lam: float
    grid: Grid
    growth: np.ndarray
    alpha: np.ndarray
    g_lambda: np.ndarray
    alpha_rate: np.ndarray
    growth_rate: np.ndarray
    system: SystemSpec

    def __post_init__(self):
        nodes = self.grid.nodes
        object.__setattr__(self, "_alpha_curve",
                           CubicHermiteCurve(nodes, self.alpha, self.alpha_rate))
        object.__setattr__(self, "_growth_curve",
                           CubicHermiteCurve(nodes, self.growth, self.growth_rate))

    def alpha_at(self, t):
        return self._alpha_curve(t)

    def growth_at(self, t):
        return self._growth_curve(t)

    def g_lambda_at(self, t):
        if np.ndim(t) == 0:
            return float(eval_expr(self.system.r, float(t))) * float(self.alpha_at(t)) \
                + float(eval_expr(self.system.g, float(t)))
        ts = np.asarray(t, dtype=float)
        return sample(self.system.r, ts) * self.alpha_at(ts) + sample(self.system.g, ts)


@dataclass(frozen=True, eq=False)
class ShiftedSystem:
    """System after moving all forcing into the second equation.

    p, q, r, s are inherited unchanged; the first equation is unforced and the
    second carries the grid-sampled forcing recorded in ``trace``.
    """

    p: Expr
    q: Expr
    r: Expr
    s: Expr
    t0: float
    trace: AlphaTrace

    def companion(self) -> SystemSpec:
        return SystemSpec(self.p, self.q, self.r, self.s,
                          Constant(0.0), Constant(0.0), self.t0)

    def forcing_at(self, t):
        return self.trace.g_lambda_at(t)

    def field(self) -> Callable[[float, np.ndarray], np.ndarray]:
        p_ = compile_scalar(self.p)
        q_ = compile_scalar(self.q)
        r_ = compile_scalar(self.r)
        s_ = compile_scalar(self.s)
        trace = self.trace

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            phi, psi = y[0], y[1]
            return np.array([p_(t) * phi + q_(t) * psi,
                             r_(t) * phi + s_(t) * psi + trace.g_lambda_at(t)])

        return rhs


@dataclass(frozen=True, eq=False)
class RiccatiProblem:
    """Scalar problem y' + fcoef y^2 + gcoef y + hcoef = 0 on span."""

    fcoef: Callable[[float], float]
    gcoef: Callable[[float], float]
    hcoef: Callable[[float], float]
    span: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.span
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError("span must be a finite increasing pair")
        object.__setattr__(self, "span", (float(lo), float(hi)))

    def field(self) -> Callable[[float, np.ndarray], np.ndarray]:
        fc, gc, hc = self.fcoef, self.gcoef, self.hcoef

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            v = y[0]
            return np.array([-(fc(t) * v * v + gc(t) * v + hc(t))])

        return rhs

    def residual(self, t: float, y: float, y_rate: float) -> float:
        return y_rate + self.fcoef(t) * y * y + self.gcoef(t) * y + self.hcoef(t)


def _require_grid_start(sys: SystemSpec, grid: Grid) -> None:
    start = float(grid.nodes[0])
    if abs(start - sys.t0) > 1e-12 * max(1.0, abs(sys.t0)):
        raise ValueError(f"grid must start at t0 = {sys.t0:g}, got {start:g}")


def alpha_lambda(sys: SystemSpec, lam: float, grid: Grid) -> AlphaTrace:
    """Shift trace on the grid: growth, alpha, and the shifted forcing."""
    _require_grid_start(sys, grid)
    ts = grid.nodes
    p_vals = sample(sys.p, ts)
    f_vals = sample(sys.f, ts)
    r_vals = sample(sys.r, ts)
    g_vals = sample(sys.g, ts)

    growth = np.exp(cumulative_integral(p_vals, grid, method="simpson"))
    if not np.all(np.isfinite(growth)):
        raise TransformError("growth factor overflows on the grid; shorten the horizon")
    forced = cumulative_integral(f_vals / growth, grid, method="simpson")
    alpha = growth * (lam + forced)
    g_lam = r_vals * alpha + g_vals
    # exact nodal slopes: growth' = p growth, alpha' = p alpha + f
    return AlphaTrace(lam=float(lam), grid=grid, growth=growth, alpha=alpha,
                      g_lambda=g_lam, alpha_rate=p_vals * alpha + f_vals,
                      growth_rate=p_vals * growth, system=sys)


def reduce_equation(eq: SecondOrderSpec, grid: Grid | None = None) -> SystemSpec:
    """Rewrite the second-order equation as a 2x2 system via psi = a phi'."""
    if grid is not None:
        eq.validate_on(grid)
    return SystemSpec(
        p=Constant(0.0),
        q=_reciprocal(eq.a),
        r=_negated(eq.c),
        s=_quotient(_negated(eq.b), eq.a),
        f=Constant(0.0),
        g=eq.d,
        t0=eq.t0,
    )


def shift_system(sys: SystemSpec, lam: float, grid: Grid) -> ShiftedSystem:
    """Move all forcing into the second equation for the given lam."""
    trace = alpha_lambda(sys, lam, grid)
    return ShiftedSystem(p=sys.p, q=sys.q, r=sys.r, s=sys.s, t0=sys.t0, trace=trace)


def riccati_of_system(
    sys: SystemSpec,
    phi1_trace: Trajectory | None = None,
    lam: float = 0.0,
    span: tuple[float, float] | None = None,
    trace: AlphaTrace | None = None,
    grid_nodes: int = DEFAULT_GRID_NODES,
) -> RiccatiProblem:
    """Scalar quadratic problem matched to the system through y = psi / phi.

    Without a first-component trace this is the homogeneous correspondence
    (hcoef = -r).  With one, the forcing enters as -r - g_lambda / phi1 and
    phi1 must stay bounded away from zero on the span.
    """
    q_ = compile_scalar(sys.q)
    p_ = compile_scalar(sys.p)
    s_ = compile_scalar(sys.s)
    r_ = compile_scalar(sys.r)

    def gcoef(t: float) -> float:
        return p_(t) - s_(t)

    if phi1_trace is None:
        if span is None:
            raise ValueError("span is required without a phi1 trace")

        def hcoef(t: float) -> float:
            return -r_(t)

        return RiccatiProblem(q_, gcoef, hcoef, span)

    if span is None:
        span = phi1_trace.span
    curve = phi1_trace.component(0)
    probe = np.linspace(span[0], span[1], 4097)
    phi_vals = np.atleast_1d(curve(probe))
    if np.any(phi_vals == 0.0) or np.any(phi_vals[:-1] * phi_vals[1:] < 0.0):
        raise TransformError("phi1 vanishes on the span; correspondence undefined")
    if trace is None:
        agrid = Grid.uniform(sys.t0, span[1], grid_nodes)
        trace = alpha_lambda(sys, lam, agrid)

    def hcoef_forced(t: float) -> float:
        return -r_(t) - trace.g_lambda_at(t) / float(curve(t))

    return RiccatiProblem(q_, gcoef, hcoef_forced, span)


def lift_riccati_solution(y: Trajectory, phi1_at_start: float, sys: SystemSpec,
                          nodes: int | None = None) -> Trajectory:
    """Rebuild (phi1, psi) from a scalar solution y: phi1 grows like
    exp of the cumulative integral of p + q y, and psi = y phi1."""
    if phi1_at_start == 0.0:
        raise ValueError("phi1 at the start of the span must be nonzero")
    lo, hi = y.span
    if nodes is None:
        nodes = max(DEFAULT_GRID_NODES + 1, 4 * len(y.grid) + 1)
    fine = Grid.uniform(lo, hi, nodes)
    ts = fine.nodes
    y_curve = y.component(0)
    y_vals = np.atleast_1d(y_curve(ts))
    y_rates = np.atleast_1d(y_curve.rate(ts))
    p_vals = sample(sys.p, ts)
    q_vals = sample(sys.q, ts)

    integrand = p_vals + q_vals * y_vals
    phi1 = phi1_at_start * np.exp(cumulative_integral(integrand, fine, method="simpson"))
    psi = y_vals * phi1
    phi1_rate = integrand * phi1
    psi_rate = y_rates * phi1 + y_vals * phi1_rate
    states = np.column_stack([phi1, psi])
    derivs = np.column_stack([phi1_rate, psi_rate])
    return Trajectory(grid=fine, states=states, events=list(y.events), derivs=derivs)


def project_to_riccati(traj: Trajectory) -> Trajectory:
    """Pointwise quotient y = psi / phi; defined only while phi keeps its sign."""
    if traj.dim != 2:
        raise ValueError("projection expects a two-component trajectory")
    phi = traj.states[:, 0]
    psi = traj.states[:, 1]
    if np.any(phi == 0.0) or np.any(phi[:-1] * phi[1:] < 0.0):
        raise TransformError("phi has a zero in the span; quotient undefined")
    y = psi / phi
    derivs = None
    if traj.derivs is not None:
        phi_rate = traj.derivs[:, 0]
        psi_rate = traj.derivs[:, 1]
        derivs = ((psi_rate * phi - phi_rate * psi) / (phi * phi))[:, None]
    return Trajectory(grid=traj.grid, states=y[:, None], events=list(traj.events),
                      derivs=derivs)
