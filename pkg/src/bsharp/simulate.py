"""Fixed-step integration harness.

Three ways to produce a trajectory on the grid t = 0, h, 2h, ...:

* ``direct`` — apply an explicit Runge-Kutta tableau with step h;
* ``reference`` — classical RK4 with internal step h/100 on the same
  system, reporting every 100th substep;
* ``modified`` / ``modifying`` — build the corresponding perturbed
  right-hand side from the tableau (truncated at a chosen order, with the
  numeric step size substituted), then integrate *that* field like
  ``reference``.

All stepping is IEEE double; exactness ends where the trajectory begins.
A step that produces a non-finite value aborts the run via
:class:`NumericFailureError`, which carries the time of the last good row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .coefficients import coeff_eval
from .errors import NumericFailureError, TableauError
from .expressions import eval_expression
from .odes import DiffCache, ODESystem, series_vector_field
from .series import modified_equation_series, modifying_integrator_series
from .tableaux import ButcherTableau, rk_series

_MODES = ("direct", "reference", "modified", "modifying")

#: substeps per output row in the reference integrator
_REFINE = 100

_RK4_A = (
    (0.0, 0.0, 0.0, 0.0),
    (0.5, 0.0, 0.0, 0.0),
    (0.0, 0.5, 0.0, 0.0),
    (0.0, 0.0, 1.0, 0.0),
)
_RK4_B = (1 / 6, 1 / 3, 1 / 3, 1 / 6)

Field = Callable[[Sequence[float]], list[float]]


@dataclass(frozen=True)
class SimulationPlan:
    """Everything needed to produce one trajectory."""

    tableau: ButcherTableau
    system: ODESystem
    step: float
    t_max: float
    initial: tuple[float, ...]
    mode: str = "direct"
    series_order: int = 2

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"unknown simulation mode {self.mode!r}")
        if not (self.step > 0):
            raise TableauError("step size must be positive")
        if not (self.t_max > 0):
            raise TableauError("t_max must be positive")
        if len(self.initial) != self.system.dimension:
            raise TableauError(
                f"initial point has {len(self.initial)} components, "
                f"system has {self.system.dimension}"
            )
        if self.mode in ("modified", "modifying") and self.series_order < 1:
            raise TableauError("series order must be at least 1")

    @property
    def rows(self) -> int:
        return int(math.floor(self.t_max / self.step + 1e-9)) + 1


def _float_tableau(tab: ButcherTableau):
    """Lower the exact tableau to doubles; symbols must be bound already."""
    a = tuple(tuple(float(coeff_eval(x, {})) for x in row) for row in tab.A)
    b = tuple(float(coeff_eval(x, {})) for x in tab.b)
    return a, b


def _require_explicit(tab: ButcherTableau) -> None:
    if not tab.is_explicit:
        raise TableauError(
            "tableau is not explicit (nonzero entry on or above the "
            "diagonal); only explicit methods can be simulated"
        )


def system_field(system: ODESystem) -> Field:
    rhs = system.rhs

    def f(y: Sequence[float]) -> list[float]:
        return [eval_expression(e, y) for e in rhs]

    return f


def graded_field(
    system: ODESystem,
    terms: list[list[tuple[int, object]]],
    step: float,
) -> Field:
    """Collapse per-degree expression lists into a numeric field.

    ``terms`` is the output of :func:`series_vector_field` for a flow-kind
    series: degree d contributes ``step**(d-1) * E_d(y)``.  The degree-0
    entry is identically zero for flow series and is skipped.
    """
    weighted: list[list[tuple[float, object]]] = []
    for component in terms:
        ws = []
        for degree, expr in component:
            if degree == 0:
                continue
            ws.append((step ** (degree - 1), expr))
        weighted.append(ws)

    def f(y: Sequence[float]) -> list[float]:
        out = []
        for ws in weighted:
            acc = 0.0
            for w, expr in ws:
                acc += w * eval_expression(expr, y)
            out.append(acc)
        return out

    return f


def _rk_step(
    a, b, f: Field, y: list[float], h: float
) -> list[float]:
    stages: list[list[float]] = []
    n = len(y)
    for i in range(len(b)):
        yi = list(y)
        row = a[i]
        for j in range(i):
            aij = row[j]
            if aij == 0.0:
                continue
            kj = stages[j]
            for m in range(n):
                yi[m] += h * aij * kj[m]
        stages.append(f(yi))
    out = list(y)
    for i, bi in enumerate(b):
        if bi == 0.0:
            continue
        ki = stages[i]
        for m in range(n):
            out[m] += h * bi * ki[m]
    return out


def _build_field(plan: SimulationPlan) -> Field:
    if plan.mode in ("direct", "reference"):
        return system_field(plan.system)
    series = rk_series(plan.tableau, plan.series_order)
    if plan.mode == "modified":
        flow = modified_equation_series(series)
    else:
        flow = modifying_integrator_series(series)
    cache = DiffCache(plan.system)
    terms = series_vector_field(flow, plan.system, cache)
    return graded_field(plan.system, terms, plan.step)


def iterate_rows(plan: SimulationPlan) -> Iterator[tuple[float, tuple[float, ...]]]:
    """Yield (t, y) rows on the output grid; raises mid-iteration on blow-up.

    The first row is the initial condition at t = 0.  When a step produces
    NaN/inf (or the right-hand side raises a numeric error), iteration stops
    with :class:`NumericFailureError` whose ``last_valid_t`` is the time of
    the last row already yielded.
    """
    _require_explicit(plan.tableau)
    field = _build_field(plan)

    if plan.mode == "direct":
        a, b = _float_tableau(plan.tableau)
        substeps, h_sub = 1, plan.step
    else:
        a, b = _RK4_A, _RK4_B
        substeps, h_sub = _REFINE, plan.step / _REFINE

    y = [float(v) for v in plan.initial]
    yield 0.0, tuple(y)
    for i in range(1, plan.rows):
        last_t = (i - 1) * plan.step
        try:
            for _ in range(substeps):
                y = _rk_step(a, b, field, y, h_sub)
        except (ZeroDivisionError, OverflowError) as exc:
            raise NumericFailureError(
                f"numeric failure during step to t = {i * plan.step!r}: {exc}",
                last_valid_t=last_t,
            ) from exc
        if not all(math.isfinite(v) for v in y):
            raise NumericFailureError(
                f"non-finite state during step to t = {i * plan.step!r}",
                last_valid_t=last_t,
            )
        yield i * plan.step, tuple(y)


def run_simulation(plan: SimulationPlan) -> list[tuple[float, tuple[float, ...]]]:
    """Collect the full trajectory (raises on numeric failure)."""
    return list(iterate_rows(plan))
