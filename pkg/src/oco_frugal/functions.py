"""Convex piecewise-quadratic cost functions on [0, 1].

Every cost function in the package (the simulation quadratics and the
piecewise lower-bound functions g1, g2, g3) is a :class:`PiecewiseConvexSpec`:
an ordered tuple of segments ``a*x**2 + b*x + c`` that tile [0, 1].

Derivatives at interior breakpoints are the right-hand derivative; values at
breakpoints come from the left segment (the two agree up to rounding).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParameterError

TOL = 1e-9


def _tol(*values: float) -> float:
    return TOL * (1.0 + max(abs(v) for v in values))


@dataclass(frozen=True)
class Segment:
    """Quadratic piece ``a*x**2 + b*x + c`` on ``[lo, hi]``."""

    lo: float
    hi: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("lo", "hi", "a", "b", "c"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"segment field {name} is not finite")
        if not self.lo < self.hi:
            raise ParameterError(f"segment needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.a < 0:
            raise ParameterError(f"segment quadratic coefficient must be >= 0, got {self.a}")

    def value(self, x: float) -> float:
        return (self.a * x + self.b) * x + self.c

    def deriv(self, x: float) -> float:
        return 2.0 * self.a * x + self.b

    def candidates(self) -> list[float]:
        """Endpoints plus the clipped vertex: where the segment minimum can sit."""
        pts = [self.lo, self.hi]
        if self.a > 0:
            v = -self.b / (2.0 * self.a)
            if self.lo < v < self.hi:
                pts.append(v)
        return pts


@dataclass(frozen=True)
class FunctionParams:
    M: float
    L: float
    x_star: float


@dataclass(frozen=True)
class PiecewiseConvexSpec:
    """Convex, continuous, piecewise-quadratic function on [0, 1].

    Construction checks tiling, per-piece convexity, value continuity and
    nondecreasing one-sided derivatives. Nonnegativity and the zero minimum
    are assumptions of the online problem rather than of the type, and are
    reported by :func:`validate_assumptions`.
    """

    segments: tuple[Segment, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ParameterError("a function needs at least one segment")
        if segs[0].lo != 0.0 or segs[-1].hi != 1.0:
            raise ParameterError("segments must start at 0 and end at 1")
        for left, right in zip(segs, segs[1:]):
            if left.hi != right.lo:
                raise ParameterError(f"gap or overlap at {left.hi} / {right.lo}")
            x = left.hi
            vl, vr = left.value(x), right.value(x)
            if abs(vl - vr) > _tol(vl, vr):
                raise ParameterError(f"discontinuous at x={x}: {vl} vs {vr}")
            dl, dr = left.deriv(x), right.deriv(x)
            if dr < dl - _tol(dl, dr):
                raise ParameterError(f"derivative decreases at x={x}: {dl} -> {dr}")
        # minimizer by vertex enumeration; leftmost on ties
        best_x, best_v = 0.0, math.inf
        for s in segs:
            for x in sorted(s.candidates()):
                v = s.value(x)
                if v < best_v:
                    best_x, best_v = x, v
        object.__setattr__(self, "x_star", best_x)
        object.__setattr__(self, "min_value", best_v)

    # -- scalar evaluation -------------------------------------------------

    @cached_property
    def _breaks(self) -> np.ndarray:
        return np.array([s.hi for s in self.segments[:-1]], dtype=float)

    @cached_property
    def _coef(self) -> np.ndarray:
        return np.array([[s.a, s.b, s.c] for s in self.segments], dtype=float)

    def _check(self, x):
        if not (0.0 <= x <= 1.0):
            raise DomainError(f"x={x} outside [0, 1]")

    def value(self, x: float) -> float:
        self._check(x)
        i = int(np.searchsorted(self._breaks, x, side="left"))
        return self.segments[i].value(x)

    __call__ = value

    def grad(self, x: float) -> float:
        self._check(x)
        i = int(np.searchsorted(self._breaks, x, side="right"))
        return self.segments[i].deriv(x)

    # -- vectorized evaluation ---------------------------------------------

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise DomainError("points outside [0, 1]")
        a, b, c = self._coef[np.searchsorted(self._breaks, xs, side="left")].T
        return (a * xs + b) * xs + c

    def grads(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise DomainError("points outside [0, 1]")
        a, b, _ = self._coef[np.searchsorted(self._breaks, xs, side="right")].T
        return 2.0 * a * xs + b

    @property
    def breakpoints(self) -> list[float]:
        return [s.lo for s in self.segments] + [1.0]

    @cached_property
    def params(self) -> FunctionParams:
        M = 2.0 * max(s.a for s in self.segments)
        L = max(max(abs(s.deriv(s.lo)), abs(s.deriv(s.hi))) for s in self.segments)
        return FunctionParams(M=M, L=L, x_star=self.x_star)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = {"segments": [dict(lo=s.lo, hi=s.hi, a=s.a, b=s.b, c=s.c) for s in self.segments]}
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PiecewiseConvexSpec":
        segs = tuple(Segment(**{k: float(s[k]) for k in ("lo", "hi", "a", "b", "c")})
                     for s in d["segments"])
        return cls(segs, name=d.get("name", ""))


def evaluate(spec: PiecewiseConvexSpec, x: float) -> float:
    """Value of ``spec`` at ``x``; left segment at breakpoints."""
    return spec.value(x)


def grad(spec: PiecewiseConvexSpec, x: float) -> float:
    """Right-hand derivative of ``spec`` at ``x``."""
    return spec.grad(x)


def params(spec: PiecewiseConvexSpec) -> FunctionParams:
    """Smoothness ``M = 2 max a``, Lipschitz constant over [0, 1] and minimizer."""
    return spec.params


@dataclass
class AssumptionReport:
    checks: dict[str, bool]
    details: dict[str, float]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks), "details": dict(self.details)}


def validate_assumptions(spec: PiecewiseConvexSpec, M_claim: float = math.inf,
                         L_claim: float = math.inf, n_samples: int = 1001) -> AssumptionReport:
    """Report convexity, continuity, nonnegativity, zero minimum and the M/L claims."""
    segs = spec.segments
    cont_gap = 0.0
    conv_gap = 0.0
    for left, right in zip(segs, segs[1:]):
        x = left.hi
        cont_gap = max(cont_gap, abs(left.value(x) - right.value(x)) - _tol(left.value(x), right.value(x)))
        conv_gap = max(conv_gap, left.deriv(x) - right.deriv(x) - _tol(left.deriv(x), right.deriv(x)))
    conv_ok = conv_gap <= 0.0 and all(s.a >= 0 for s in segs)

    pts = np.union1d(np.linspace(0.0, 1.0, n_samples),
                     [x for s in segs for x in s.candidates()])
    fmin_sampled = float(spec.values(pts).min())
    p = spec.params
    scale = 1.0 + p.L
    details = {
        "min_value": spec.min_value,
        "min_sampled": fmin_sampled,
        "x_star": spec.x_star,
        "M": p.M,
        "L": p.L,
        "M_claim": M_claim,
        "L_claim": L_claim,
    }
    checks = {
        "convexity": conv_ok,
        "continuity": cont_gap <= 0.0,
        "nonnegativity": fmin_sampled >= -TOL * scale,
        "zero_minimum": abs(spec.min_value) <= TOL * scale,
        "smoothness": p.M <= M_claim + TOL * (1.0 + p.M),
        "lipschitz": p.L <= L_claim + TOL * (1.0 + p.L),
    }
    return AssumptionReport(checks, details)


# -- constructors ------------------------------------------------------------

def make_quadratic(a: float, center: float, name: str = "") -> PiecewiseConvexSpec:
    """``a * (x - center)**2`` on [0, 1]."""
    if not (a >= 0 and math.isfinite(a)):
        raise ParameterError(f"quadratic coefficient must be finite and >= 0, got {a}")
    if not 0.0 <= center <= 1.0:
        raise ParameterError(f"center must lie in [0, 1], got {center}")
    return PiecewiseConvexSpec((Segment(0.0, 1.0, a, -2.0 * a * center, a * center * center),),
                               name=name)


def _shifted_quadratic(k: float, center: float, offset: float = 0.0) -> tuple[float, float, float]:
    # k*(x-center)**2 + offset as (a, b, c)
    return k, -2.0 * k * center, k * center * center + offset


def _linear(slope: float, intercept: float) -> tuple[float, float, float]:
    return 0.0, slope, intercept


def _assemble(pieces: Sequence[tuple[float, float, tuple[float, float, float]]],
              name: str) -> PiecewiseConvexSpec:
    segs = []
    for lo, hi, (a, b, c) in pieces:
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        if lo < hi:
            segs.append(Segment(lo, hi, a, b, c))
    return PiecewiseConvexSpec(tuple(segs), name=name)


def make_lower_bound_g(which: int, grad_mag: float, M: float) -> PiecewiseConvexSpec:
    """One of the three indistinguishable lower-bound functions g1, g2, g3.

    All three share value ``grad_mag**2 / M`` and slope ``-grad_mag`` at 0 and
    are M-smooth; their minimizers are 1.5, 2 and 2.5 times ``grad_mag / M``.
    """
    g, m = float(grad_mag), float(M)
    if not m > 0:
        raise ParameterError(f"M must be > 0, got {M}")
    if not g > 3:
        raise ParameterError(f"grad_mag > 3 required, got {grad_mag}")
    if 5.0 * g / (2.0 * m) > 1.0 + 1e-12:
        raise ParameterError(f"5*grad_mag/(2M) <= 1 required, got {5.0 * g / (2.0 * m)}")
    r = g / m
    if which == 1:
        pieces = [
            (0.0, r / 2, _linear(-g, g * g / m)),
            (r / 2, 1.0, _shifted_quadratic(m / 2, 1.5 * r)),
        ]
    elif which == 2:
        pieces = [
            (0.0, r / 2, _shifted_quadratic(m / 2, r, g * g / (2 * m))),
            (r / 2, 1.5 * r, _linear(-g / 2, (g / 2) * (7 * r / 4))),
            (1.5 * r, 1.0, _shifted_quadratic(m / 2, 2 * r)),
        ]
    elif which == 3:
        pieces = [
            (0.0, 2 * r / 3, _shifted_quadratic(m / 2, r, g * g / (2 * m))),
            (2 * r / 3, 13 * r / 6, _linear(-g / 3, (g / 3) * (7 * r / 3))),
            (13 * r / 6, 1.0, _shifted_quadratic(m / 2, 2.5 * r)),
        ]
    else:
        raise ParameterError(f"which must be 1, 2 or 3, got {which}")
    return _assemble(pieces, name=f"g{which}")


def random_convex_spec(rng: np.random.Generator, n_segments: int = 3,
                       max_curvature: float = 10.0, max_slope: float = 5.0,
                       smooth: bool = False) -> PiecewiseConvexSpec:
    """Random convex piecewise spec with zero minimum, for property tests.

    The derivative is built piecewise linear and nondecreasing, then integrated
    so continuity holds by construction. With ``smooth`` the derivative has no
    jumps, so ``params().M`` bounds its variation everywhere.
    """
    cuts = np.sort(rng.uniform(0.05, 0.95, size=n_segments - 1))
    edges = np.concatenate([[0.0], cuts, [1.0]])
    kinds = rng.integers(0, 2, size=n_segments)  # 0 linear, 1 quadratic
    a = np.where(kinds == 1, rng.uniform(0.0, max_curvature / 2, size=n_segments), 0.0)
    d = rng.uniform(-max_slope, 0.0)
    segs = []
    for i in range(n_segments):
        lo, hi = float(edges[i]), float(edges[i + 1])
        # derivative 2a x + b equals d at lo
        b = d - 2 * a[i] * lo
        if i == 0:
            c = 0.0
        else:
            prev = segs[-1]
            c = prev.value(lo) - (a[i] * lo + b) * lo
        segs.append(Segment(lo, hi, float(a[i]), float(b), float(c)))
        d = 2 * a[i] * hi + b
        if not smooth:
            d += rng.uniform(0.0, max_slope / n_segments)
    spec = PiecewiseConvexSpec(tuple(segs))
    shift = spec.min_value
    return PiecewiseConvexSpec(tuple(Segment(s.lo, s.hi, s.a, s.b, s.c - shift) for s in segs))


# -- text serialization ------------------------------------------------------

def dumps(specs: Iterable[PiecewiseConvexSpec]) -> str:
    """Serialize functions as a JSON document ``{"functions": [...]}``."""
    return json.dumps({"functions": [s.to_dict() for s in specs]}, indent=2)


def loads(text: str) -> list[PiecewiseConvexSpec]:
    doc = json.loads(text)
    items = doc["functions"] if isinstance(doc, dict) else doc
    return [PiecewiseConvexSpec.from_dict(d) for d in items]
