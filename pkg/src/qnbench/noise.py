"""Noisy evaluation oracles.

A :class:`NoisyOracle` wraps a clean problem behind the only evaluation
surface a solver sees: it injects the configured noise model into objective
and gradient evaluations and counts every call. Three models are supported:

* ``exact`` passes values through unchanged,
* ``additive_uniform`` adds independent uniform draws from
  ``[-level, +level]`` to the objective and to each gradient component,
* ``precision_cast`` rounds the *input* vector to a narrower IEEE-754
  format (binary64/32/16, round-to-nearest-even) and evaluates the clean
  functions on the rounded point in full precision.

Draws come from a counter-based Philox stream seeded per oracle instance,
so identical (kind, seed, call-sequence) triples reproduce identical noisy
values bit for bit, independent of platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problems import ObjectiveProblem

Array = np.ndarray

KINDS = ("exact", "additive_uniform", "precision_cast")
GRAD_MODES = ("percomp", "rank1")

# Default objective error rates per model: large multiples of the machine
# epsilon of the evaluation format, to cover accumulated round-off.
CAST_EPS_F = {64: 2.22e-9, 32: 1.19e-3, 16: 9.77e-2}
UNIFORM_EPS_F = 1e-2


@dataclass(frozen=True)
class NoiseModel:
    """Configuration of the injected evaluation noise.

    ``level`` applies to ``additive_uniform`` only; ``bits`` to
    ``precision_cast`` only. ``grad_mode`` selects whether uniform gradient
    noise is drawn per component (``percomp``) or as a single draw shared by
    all components (``rank1``).
    """

    kind: str = "exact"
    level: float = 0.0
    bits: int = 64
    seed: int = 0
    grad_mode: str = "percomp"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "additive_uniform" and not self.level > 0:
            raise ValueError("additive_uniform needs level > 0")
        if self.kind == "precision_cast" and self.bits not in (64, 32, 16):
            raise ValueError("precision_cast bits must be 64, 32 or 16")
        if self.grad_mode not in GRAD_MODES:
            raise ValueError(f"grad_mode must be one of {GRAD_MODES}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")


def default_eps_f(model: NoiseModel) -> float:
    """Objective error rate matching the noise model."""
    if model.kind == "exact":
        return 0.0
    if model.kind == "additive_uniform":
        return UNIFORM_EPS_F
    return CAST_EPS_F[model.bits]


class OracleError(RuntimeError):
    """A noisy evaluation produced a non-finite value."""

    def __init__(self, message: str, x: Optional[Array] = None, kind: Optional[str] = None):
        super().__init__(message)
        self.x = x
        self.kind = kind


class NoisyOracle:
    """Counting evaluation oracle for one (problem, noise model) pair.

    Instances hold a private RNG stream and mutable call counters, so each
    one must be confined to a single worker. ``eps_f`` defaults to
    :func:`default_eps_f` for the model.
    """

    def __init__(self, problem: ObjectiveProblem, model: NoiseModel = NoiseModel(), eps_f: Optional[float] = None):
        self.problem = problem
        self.model = model
        self.eps_f = default_eps_f(model) if eps_f is None else float(eps_f)
        if not 0.0 <= self.eps_f < 1.0:
            raise ValueError("eps_f must lie in [0, 1)")
        self.f_calls = 0
        self.g_calls = 0
        self._rng = np.random.Generator(np.random.Philox(model.seed))

    def _cast_input(self, x: Array) -> Array:
        bits = self.model.bits
        if bits == 64:
            return x
        target = np.float32 if bits == 32 else np.float16
        with np.errstate(over="ignore"):
            rounded = x.astype(target).astype(np.float64)
        if not np.all(np.isfinite(rounded)):
            raise OracleError(
                f"input overflows binary{bits} range", x=x, kind=self.model.kind
            )
        return rounded

    def f_bar(self, x: Array) -> float:
        """Noisy objective value; increments ``f_calls``."""
        x = np.asarray(x, dtype=float)
        self.f_calls += 1
        kind = self.model.kind
        if kind == "exact":
            val = self.problem.f(x)
        elif kind == "additive_uniform":
            val = self.problem.f(x) + self._rng.uniform(-self.model.level, self.model.level)
        else:
            val = self.problem.f(self._cast_input(x))
        if not np.isfinite(val):
            raise OracleError(f"non-finite objective under {kind} model", x=x, kind=kind)
        return float(val)

    def grad_bar(self, x: Array) -> Array:
        """Noisy gradient; increments ``g_calls``."""
        x = np.asarray(x, dtype=float)
        self.g_calls += 1
        kind = self.model.kind
        if kind == "exact":
            g = self.problem.grad(x)
        elif kind == "additive_uniform":
            g = self.problem.grad(x)
            if self.model.grad_mode == "percomp":
                g = g + self._rng.uniform(-self.model.level, self.model.level, size=g.shape)
            else:
                g = g + self._rng.uniform(-self.model.level, self.model.level)
        else:
            g = self.problem.grad(self._cast_input(x))
        if not np.all(np.isfinite(g)):
            raise OracleError(f"non-finite gradient under {kind} model", x=x, kind=kind)
        return np.asarray(g, dtype=float)

    @property
    def oracle_calls(self) -> int:
        return self.f_calls + self.g_calls
