"""A-OBD: approximate online balanced descent with one value/gradient per step.

At step t the algorithm sees a single value ``f_avl`` and gradient
``grad_avl`` at the previous action and moves to the intersection of the
tangent line through ``(x_prev, f_avl)`` with the line of slope
``delta * sign(-grad_avl)`` through ``(x_prev, 0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (AssumptionViolation, FormulaInvalidError, NoInformation, NumericError,
                     ParameterError)
from .functions import PiecewiseConvexSpec, validate_assumptions

SETTINGS = ("fresh", "stale", "noisy-fresh", "noisy-stale")


@dataclass(frozen=True)
class Observation:
    f_avl: float
    grad_avl: float
    source_time: int
    clean_grad: float = math.nan  # gradient before noise; never used by the step rule
    clipped: bool = False


@dataclass(frozen=True)
class StepRecord:
    t: int
    x_prev: float
    obs: Optional[Observation]
    delta: float
    x_new: float
    hit: float
    move: float
    true_grad: float


@dataclass(frozen=True)
class Trajectory:
    x0: float
    steps: tuple[StepRecord, ...]
    setting: str
    a4_clips: int = 0

    @property
    def xs(self) -> np.ndarray:
        """Actions x_1..x_T."""
        return np.array([s.x_new for s in self.steps])

    @property
    def hits(self) -> np.ndarray:
        return np.array([s.hit for s in self.steps])

    @property
    def moves(self) -> np.ndarray:
        return np.array([s.move for s in self.steps])

    @property
    def total(self) -> float:
        return float(self.hits.sum() + self.moves.sum())

    def __len__(self):
        return len(self.steps)


# -- step rule ---------------------------------------------------------------

def aobd_step(obs: Observation, x_prev: float, delta: float) -> float:
    """Intersection of the tangent line and the slope-``delta`` line, clamped to [0, 1]."""
    f, g = obs.f_avl, obs.grad_avl
    if not all(math.isfinite(v) for v in (f, g, x_prev, delta)):
        raise NumericError(f"non-finite input: f={f}, grad={g}, x_prev={x_prev}, delta={delta}")
    if f < 0:
        raise ParameterError(f"available value must be >= 0, got {f}")
    if not delta > 0:
        raise ParameterError(f"delta must be > 0, got {delta}")
    if g == 0.0:
        return x_prev
    step = f / (delta + abs(g))
    x = x_prev - step if g > 0 else x_prev + step
    return min(1.0, max(0.0, x))


# -- delta policies ----------------------------------------------------------

def delta_fresh(M: float, mode: str = "paper") -> float:
    """Balance parameter for the fresh setting.

    ``paper`` is the printed closed form with ``+7`` under the root;
    ``balanced`` equates both branches of ``max{d+1+M/2, 2+2/d+M/(2d)}``,
    which puts ``+8`` there instead.
    """
    if not M > 0:
        raise ParameterError(f"M must be > 0, got {M}")
    if mode == "paper":
        return 0.5 * math.sqrt((M / 2 + 1) ** 2 + 7) - M / 4 + 0.5
    if mode == "balanced":
        return 0.5 * math.sqrt((M / 2 + 1) ** 2 + 8) - M / 4 + 0.5
    raise ParameterError(f"unknown mode {mode!r}")


def delta_stale(M: float, L: float, mode: str = "corrected") -> float:
    """Balance parameter for the stale setting.

    ``corrected`` is the positive root of
    ``d**2 + (M/2 + L - 1) d - (2L + 2 + M/2) = 0``. ``literal`` evaluates the
    printed expression whose discriminant carries ``-8(M + 4L + 4)``; it has no
    real value for small M and L.
    """
    if not (M > 0 and L > 0):
        raise ParameterError(f"M and L must be > 0, got M={M}, L={L}")
    k = M + 2 * L - 2
    if mode == "corrected":
        return 0.25 * math.sqrt(k * k + 8 * (M + 4 * L + 4)) - k / 4
    if mode == "literal":
        disc = k * k - 8 * (M + 4 * L + 4)
        if disc < 0:
            raise FormulaInvalidError(
                f"literal stale delta: discriminant (M+2L-2)^2 - 8(M+4L+4) = {disc} < 0")
        val = 0.25 * math.sqrt(disc) - k / 4
        if not val > 0:
            raise FormulaInvalidError(f"literal stale delta is not positive: {val}")
        return val
    raise ParameterError(f"unknown mode {mode!r}")


def delta_noisy(G: float, L: float, grad_avl: float) -> float:
    """``G + L - |grad_avl|``, so that ``|grad_avl| + delta`` stays at ``G + L``."""
    if not (G > 0 and L > 0):
        raise ParameterError(f"G and L must be > 0, got G={G}, L={L}")
    if abs(grad_avl) > G:
        raise AssumptionViolation(f"A3 violated: |grad_avl|={abs(grad_avl)} > G={G}")
    return G + L - abs(grad_avl)


@dataclass(frozen=True)
class DeltaPolicy:
    """Rule producing delta_t; build with the classmethods."""

    kind: str
    M: float = math.nan
    L: float = math.nan
    G: float = math.nan
    value: float = math.nan

    @classmethod
    def fresh_paper(cls, M):
        return cls("fresh_paper", M=M, value=delta_fresh(M, "paper"))

    @classmethod
    def fresh_balanced(cls, M):
        return cls("fresh_balanced", M=M, value=delta_fresh(M, "balanced"))

    @classmethod
    def stale_literal(cls, M, L):
        return cls("stale_literal", M=M, L=L, value=delta_stale(M, L, "literal"))

    @classmethod
    def stale_corrected(cls, M, L):
        return cls("stale_corrected", M=M, L=L, value=delta_stale(M, L, "corrected"))

    @classmethod
    def noisy(cls, G, L):
        if not (G > 0 and L > 0):
            raise ParameterError(f"G and L must be > 0, got G={G}, L={L}")
        return cls("noisy", L=L, G=G)

    @classmethod
    def fixed(cls, delta):
        if not delta > 0:
            raise ParameterError(f"delta must be > 0, got {delta}")
        return cls("fixed", value=delta)

    @property
    def is_constant(self) -> bool:
        return self.kind != "noisy"

    def delta(self, obs: Optional[Observation] = None) -> float:
        if self.kind == "noisy":
            return delta_noisy(self.G, self.L, obs.grad_avl)
        return self.value


# -- information oracles -----------------------------------------------------

@dataclass(frozen=True)
class NoiseModel:
    """Gradient perturbation with ``|e| <= alpha``.

    ``kind`` is ``none``, ``uniform`` (e ~ U[-alpha, alpha]) or ``extremal``
    (e = +/-alpha following ``sign_pattern``, cycled over steps). Noise that
    would reach or flip the sign of the clean gradient is clipped to
    ``(1 - 1e-9) |grad|`` unless ``strict``, in which case it raises.
    """

    kind: str = "none"
    alpha: float = 0.0
    sign_pattern: tuple[int, ...] = (1,)
    strict: bool = False

    @classmethod
    def uniform(cls, alpha, strict=False):
        return cls("uniform", alpha, strict=strict)

    @classmethod
    def extremal(cls, alpha, sign_pattern=(1,), strict=False):
        if isinstance(sign_pattern, str):
            sign_pattern = tuple(1 if ch == "+" else -1 for ch in sign_pattern)
        return cls("extremal", alpha, tuple(sign_pattern), strict)

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "extremal"):
            raise ParameterError(f"unknown noise kind {self.kind!r}")
        if not self.alpha >= 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")

    def draw(self, t: int, rng: Optional[np.random.Generator]) -> float:
        if self.kind == "none" or self.alpha == 0:
            return 0.0
        if self.kind == "uniform":
            return float(rng.uniform(-self.alpha, self.alpha))
        return self.sign_pattern[(t - 1) % len(self.sign_pattern)] * self.alpha


def observe(setting: str, fseq: Sequence[PiecewiseConvexSpec], t: int, x_prev: float,
            noise: NoiseModel = NoiseModel(), rng: Optional[np.random.Generator] = None) -> Observation:
    """Value/gradient pair available before choosing x_t (t is 1-based)."""
    if setting not in SETTINGS:
        raise ParameterError(f"unknown setting {setting!r}")
    if not 1 <= t <= len(fseq):
        raise ParameterError(f"t={t} outside [1, {len(fseq)}]")
    src = t if setting in ("fresh", "noisy-fresh") else t - 1
    if src < 1:
        raise NoInformation("stale setting has no information at t=1")
    f = fseq[src - 1]
    value, g = f.value(x_prev), f.grad(x_prev)
    if not setting.startswith("noisy"):
        return Observation(value, g, src, clean_grad=g)
    e = noise.draw(t, rng)
    clipped = False
    if abs(e) >= abs(g) and e != 0.0:
        if noise.strict:
            raise AssumptionViolation(f"A4 violated at t={t}: |noise|={abs(e)} >= |grad|={abs(g)}")
        e = math.copysign((1 - 1e-9) * abs(g), e)
        clipped = True
    return Observation(value, g + e, src, clean_grad=g, clipped=clipped)


def _validate_fseq(fseq, policy: DeltaPolicy):
    M_claim = policy.M if math.isfinite(policy.M) else math.inf
    L_claim = policy.L if math.isfinite(policy.L) else math.inf
    cache = {}
    for t, f in enumerate(fseq, start=1):
        if id(f) not in cache:
            cache[id(f)] = validate_assumptions(f, M_claim, L_claim)
        rep = cache[id(f)]
        if not rep.ok:
            raise AssumptionViolation(f"f_{t} fails {', '.join(rep.failed)}", rep)


def run(fseq: Sequence[PiecewiseConvexSpec], setting: str, policy: DeltaPolicy,
        noise: NoiseModel = NoiseModel(), x0: float = 0.0, seed: int = 0,
        check_assumptions: bool = True) -> Trajectory:
    """Run A-OBD over ``fseq``.

    In the stale settings x_1 = x0 and observations are consumed from t = 2,
    so the stale actions are the fresh actions shifted by one step.
    """
    if setting not in SETTINGS:
        raise ParameterError(f"unknown setting {setting!r}")
    if check_assumptions:
        _validate_fseq(fseq, policy)
    rng = np.random.default_rng(seed)
    x = float(x0)
    steps = []
    clips = 0
    for t in range(1, len(fseq) + 1):
        f = fseq[t - 1]
        true_grad = f.grad(x)
        try:
            obs = observe(setting, fseq, t, x, noise, rng)
        except NoInformation:
            obs, delta, x_new = None, (policy.value if policy.is_constant else math.nan), x
        else:
            clips += obs.clipped
            delta = policy.delta(obs)
            x_new = aobd_step(obs, x, delta)
        steps.append(StepRecord(t, x, obs, delta, x_new, f.value(x_new), abs(x_new - x), true_grad))
        x = x_new
    return Trajectory(float(x0), tuple(steps), setting, clips)
