"""Backtracking line search with an error-absorbing acceptance test.

The acceptance test is the Armijo condition relaxed by a slack term that
upper-bounds what bounded evaluation errors can do to an observed decrease:

    f_bar(x) + c * alpha * g'd + delta >= f_bar(x + alpha d),
    delta = (2 eps_f / (1 - eps_f)) * max(1, f_bar(x), -f_bar(x + alpha d)).

With ``eps_f = 0`` this is exactly the classical Armijo test. ``delta`` is
recomputed at every trial because it depends on the trial value itself; it
deliberately ignores large *positive* trial values so it cannot grow without
bound. Rejected steps are shrunk by quadratic interpolation clipped to
``[beta_min * alpha, beta_max * alpha]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

Array = np.ndarray


@dataclass(frozen=True)
class LineSearchConfig:
    c: float = 1e-4
    beta_min: float = 1.0 / 16.0
    beta_max: float = 15.0 / 16.0
    max_rejections: int = 100

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValueError("c must lie in (0, 1)")
        if not 0.0 < self.beta_min < self.beta_max < 1.0:
            raise ValueError("need 0 < beta_min < beta_max < 1")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be positive")


@dataclass
class LineSearchResult:
    alpha: float
    delta: float
    f_bar_new: float
    rejections: int  # objective probes beyond the first (keeps call accounting exact)
    rescaled: bool = False
    exhausted: bool = False
    # Gradient at the accepted point when the rescale probe could be reused;
    # took_grad_probe records that a probe was spent either way.
    g_new: Optional[Array] = None
    took_grad_probe: bool = False


def compute_delta(eps_f: float, f_bar_x: float, f_bar_trial: float) -> float:
    """Error-absorbing slack for one acceptance test."""
    if not 0.0 <= eps_f < 1.0:
        raise ValueError("eps_f must lie in [0, 1)")
    return (2.0 * eps_f / (1.0 - eps_f)) * max(1.0, f_bar_x, -f_bar_trial)


def _interpolate(alpha: float, f0: float, gtd: float, f_trial: float, cfg: LineSearchConfig) -> float:
    """Minimizer of the quadratic fit through (f0, gtd, f_trial), clipped.

    Degenerate or negative-curvature fits fall back to alpha/2, which always
    lies inside the clip interval.
    """
    denom = 2.0 * (f_trial - f0 - gtd * alpha)
    if denom > 0.0:
        cand = -gtd * alpha * alpha / denom
    else:
        cand = 0.5 * alpha
    if not np.isfinite(cand):
        cand = 0.5 * alpha
    return min(max(cand, cfg.beta_min * alpha), cfg.beta_max * alpha)


def secant_rescale(alpha: float, d: Array, g: Array, g_try: Array, cfg: LineSearchConfig) -> float:
    """One-time step rescale from the directional-derivative sign change.

    Applies only when the directional derivative flips sign between the
    current and trial points and the trial gradient is strictly aligned with
    ``d`` (d'g_try > 0.5 ||d|| ||g_try||); otherwise ``alpha`` is returned
    unchanged. The secant factor is clipped to the usual backtracking window.
    """
    dg = float(d @ g)
    dgt = float(d @ g_try)
    if not (dg < 0.0 and dgt > 0.0):
        return alpha
    if not dgt > 0.5 * float(np.linalg.norm(d)) * float(np.linalg.norm(g_try)):
        return alpha
    cand = alpha * (-dg) / (dgt - dg)
    return min(max(cand, cfg.beta_min * alpha), cfg.beta_max * alpha)


def backtrack(
    oracle,
    x: Array,
    d: Array,
    g: Array,
    f_bar_x: float,
    cfg: LineSearchConfig,
    mu: float = 0.0,
    allow_rescale: bool = False,
    eps_f: Optional[float] = None,
) -> LineSearchResult:
    """Find a step along descent direction ``d`` passing the relaxed test.

    Starts at ``alpha = 1`` and shrinks by clipped interpolation on each
    rejection. If rejections exceed ``cfg.max_rejections`` the smallest trial
    is accepted anyway with ``exhausted`` set: the relaxed test holds for
    small enough steps, so running out indicates a broken error model rather
    than a recoverable state.

    When ``mu > 0``, ``allow_rescale`` is set and the very first trial is
    accepted, one gradient probe at the trial point may rescale the step by a
    secant factor; the rescaled step is re-tested and the pre-rescale
    acceptance is restored if it fails. The probe gradient is handed back via
    ``g_new`` whenever it was taken at the finally accepted point.
    """
    if eps_f is None:
        eps_f = oracle.eps_f
    gtd = float(g @ d)
    alpha = 1.0
    probes = 0
    exhausted = False
    while True:
        f_trial = oracle.f_bar(x + alpha * d)
        probes += 1
        delta = compute_delta(eps_f, f_bar_x, f_trial)
        if f_bar_x + cfg.c * alpha * gtd + delta >= f_trial:
            break
        if probes - 1 >= cfg.max_rejections:
            exhausted = True
            break
        alpha = _interpolate(alpha, f_bar_x, gtd, f_trial, cfg)

    g_new = None
    took_probe = False
    rescaled = False
    if allow_rescale and mu > 0.0 and probes == 1 and not exhausted:
        g_try = oracle.grad_bar(x + d)
        took_probe = True
        alpha2 = secant_rescale(1.0, d, g, g_try, cfg)
        if alpha2 == 1.0:
            g_new = g_try
        else:
            f_trial2 = oracle.f_bar(x + alpha2 * d)
            probes += 1
            delta2 = compute_delta(eps_f, f_bar_x, f_trial2)
            if f_bar_x + cfg.c * alpha2 * gtd + delta2 >= f_trial2:
                alpha, f_trial, delta = alpha2, f_trial2, delta2
                rescaled = True
            else:
                g_new = g_try

    return LineSearchResult(
        alpha=alpha,
        delta=delta,
        f_bar_new=f_trial,
        rejections=probes - 1,
        rescaled=rescaled,
        exhausted=exhausted,
        g_new=g_new,
        took_grad_probe=took_probe,
    )
