import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnbench.linesearch import LineSearchConfig, backtrack, compute_delta, secant_rescale
from qnbench.noise import NoiseModel, NoisyOracle
from qnbench.problems import ObjectiveProblem, get_problem

CFG = LineSearchConfig()


def scalar_problem(f, grad, x0=1.0, name="scalar"):
    return ObjectiveProblem(name + "_n1", 1, lambda x: float(f(x[0])), lambda x: np.array([grad(x[0])]), np.array([x0]))


class FixedOracle:
    """Duck-typed oracle returning scripted objective values."""

    def __init__(self, values, eps_f=0.0):
        self._values = list(values)
        self.eps_f = eps_f
        self.f_calls = 0
        self.g_calls = 0

    def f_bar(self, x):
        self.f_calls += 1
        if len(self._values) > 1:
            return self._values.pop(0)
        return self._values[0]

    def grad_bar(self, x):
        self.g_calls += 1
        return np.zeros_like(x)


class TestComputeDelta:
    def test_zero_eps_f_always_zero(self):
        assert compute_delta(0.0, 123.0, -456.0) == 0.0

    def test_negative_trial_dominates(self):
        assert compute_delta(0.5, 3.0, -5.0) == 10.0

    def test_clamps_at_one(self):
        assert compute_delta(1e-2, 0.2, 0.1) == pytest.approx(0.020202020202020204)

    def test_eps_f_range(self):
        with pytest.raises(ValueError):
            compute_delta(1.0, 0.0, 0.0)

    @given(
        st.floats(0.0, 0.99),
        st.floats(-1e6, 1e6),
        st.floats(-1e6, 1e6),
    )
    @settings(max_examples=200)
    def test_nonnegative_and_ignores_large_positive_trials(self, eps_f, fx, ftrial):
        d = compute_delta(eps_f, fx, ftrial)
        assert d >= 0.0
        # raising the trial value can only shrink or keep the slack
        assert compute_delta(eps_f, fx, ftrial + 10.0) <= d


class TestBacktrack:
    def test_exact_sphere_accepts_unit_step(self):
        p = get_problem("sphere_n2")
        o = NoisyOracle(p, NoiseModel(), eps_f=0.0)
        x = np.array([1.0, 0.0])
        g = np.array([1.0, 0.0])
        res = backtrack(o, x, -g, g, 0.5, CFG, eps_f=0.0)
        assert res.alpha == 1.0
        assert res.f_bar_new == 0.0
        assert res.rejections == 0
        assert res.delta == 0.0
        assert o.f_calls == 1

    def test_overscaled_direction_interpolates(self):
        # f = x^2/2 at x=1 with d=-4: first trial rejected, quadratic fit
        # lands exactly on alpha = 0.25 and hits the minimum
        p = scalar_problem(lambda t: 0.5 * t * t, lambda t: t)
        o = NoisyOracle(p, NoiseModel(), eps_f=0.0)
        res = backtrack(o, np.array([1.0]), np.array([-4.0]), np.array([1.0]), 0.5, CFG, eps_f=0.0)
        assert res.alpha == 0.25
        assert res.f_bar_new == 0.0
        assert res.rejections == 1
        assert o.f_calls == 2

    def test_pure_noise_plateau_accepts_with_slack(self):
        # constant observed objective, eps_f = 0.5: slack 2 covers everything
        p = scalar_problem(lambda t: 1.0, lambda t: 0.0, name="plateau")
        o = NoisyOracle(p, NoiseModel(), eps_f=0.5)
        res = backtrack(o, np.array([0.0]), np.array([-1.0]), np.array([1.0]), 1.0, CFG, eps_f=0.5)
        assert res.alpha == 1.0
        assert res.rejections == 0
        assert res.delta == pytest.approx(2.0)

    def test_relaxed_equals_classical_when_exact(self):
        p = scalar_problem(lambda t: 0.5 * t * t, lambda t: t)
        o = NoisyOracle(p, NoiseModel(), eps_f=0.0)
        res = backtrack(o, np.array([1.0]), np.array([-1.0]), np.array([1.0]), 0.5, CFG, eps_f=0.0)
        assert res.delta == 0.0  # classical Armijo exactly

    def test_accepted_step_respects_slack_bound(self):
        rng = np.random.default_rng(8)
        p = get_problem("rosenbrock_n2")
        model = NoiseModel(kind="additive_uniform", level=1e-3, seed=21)
        o = NoisyOracle(p, model)
        x = p.x0.copy()
        for _ in range(30):
            g = o.grad_bar(x)
            fx = o.f_bar(x)
            d = -g / max(1.0, float(np.linalg.norm(g)))
            res = backtrack(o, x, d, g, fx, CFG, eps_f=1e-2)
            if not res.exhausted:
                assert res.f_bar_new <= fx + res.delta
            x = x + res.alpha * d + 0.01 * rng.standard_normal(2)

    def test_step_shrink_bounds_and_exhaustion(self):
        # scripted oracle: every trial comes back far above the incumbent
        cfg = LineSearchConfig(max_rejections=12)
        o = FixedOracle([10.0], eps_f=0.0)
        res = backtrack(o, np.array([0.0]), np.array([-1.0]), np.array([1.0]), 0.0, cfg, eps_f=0.0)
        assert res.exhausted
        assert res.rejections == 12
        assert o.f_calls == 13
        assert cfg.beta_min**12 <= res.alpha <= cfg.beta_max**12

    def test_smooth_quadratic_rejection_count_bound(self):
        # d = -scale * g on f = t^2/2: model curvature m_est = 1/scale, L = 1.
        # Backtracking must stop within ceil(log(2(1-c) m_est / L) / log(beta_max))
        # rejections once that quantity is >= 1.
        for scale in (4.0, 16.0, 64.0):
            p = scalar_problem(lambda t: 0.5 * t * t, lambda t: t)
            o = NoisyOracle(p, NoiseModel(), eps_f=0.0)
            g = np.array([1.0])
            res = backtrack(o, np.array([1.0]), -scale * g, g, 0.5, CFG, eps_f=0.0)
            threshold = 2.0 * (1.0 - CFG.c) / scale
            bound = math.ceil(math.log(threshold) / math.log(CFG.beta_max))
            assert not res.exhausted
            assert res.rejections <= max(bound, 0) + 1

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LineSearchConfig(c=0.0)
        with pytest.raises(ValueError):
            LineSearchConfig(beta_min=0.5, beta_max=0.25)
        with pytest.raises(ValueError):
            LineSearchConfig(max_rejections=0)


class TestSecantRescale:
    def test_no_sign_change_unchanged(self):
        d = np.array([1.0, 0.0])
        assert secant_rescale(1.0, d, np.array([-2.0, 0.0]), np.array([-1.0, 0.0]), CFG) == 1.0

    def test_alignment_strictly_above_threshold_required(self):
        # alignment one ulp above the 0.5 cosine threshold fails the strict test
        d = np.array([1.0, 0.0])
        g = np.array([-2.0, 0.0])
        g_try = np.array([1.0, np.nextafter(np.sqrt(3.0), 2.0)])
        assert secant_rescale(1.0, d, g, g_try, CFG) == 1.0

    def test_secant_factor_applied(self):
        d = np.array([1.0, 0.0])
        g = np.array([-2.0, 0.0])
        g_try = np.array([3.0, 0.1])
        # factor 2/(3+2) = 0.4, inside the clip window
        assert secant_rescale(1.0, d, g, g_try, CFG) == pytest.approx(0.4)

    def test_collinear_full_alignment(self):
        out = secant_rescale(1.0, np.array([1.0]), np.array([-2.0]), np.array([2.0]), CFG)
        assert out == pytest.approx(0.5)

    def test_clipping(self):
        d = np.array([1.0])
        g = np.array([-1e-6])
        g_try = np.array([1.0])
        # raw factor ~ 1e-6: clipped at beta_min
        assert secant_rescale(1.0, d, g, g_try, CFG) == CFG.beta_min


class TestRescaleFlow:
    def test_probe_reused_when_guard_fails(self):
        # exact quadratic, d = -g: trial gradient stays negative along d, no
        # sign change, so alpha stays 1 and the probe is handed back
        p = scalar_problem(lambda t: 0.5 * t * t, lambda t: t)
        o = NoisyOracle(p, NoiseModel(), eps_f=0.0)
        g = np.array([1.0])
        res = backtrack(o, np.array([1.0]), -0.5 * g, g, 0.5, CFG, mu=1.0, allow_rescale=True, eps_f=0.0)
        assert res.alpha == 1.0
        assert not res.rescaled
        assert res.took_grad_probe
        assert res.g_new is not None
        assert o.g_calls == 1

    def test_rescale_applied_and_probe_discarded(self):
        # overshooting step on a quadratic: directional derivative flips sign,
        # rescale brings alpha to the exact line minimum at 0.5
        p = scalar_problem(lambda t: 0.5 * t * t, lambda t: t)
        o = NoisyOracle(p, NoiseModel(), eps_f=0.2)
        g = np.array([1.0])
        res = backtrack(o, np.array([1.0]), np.array([-2.0]), g, 0.5, CFG, mu=1.0, allow_rescale=True, eps_f=0.2)
        assert res.rescaled
        assert res.alpha == pytest.approx(0.5)
        assert res.g_new is None
        assert res.took_grad_probe
        assert res.rejections == 1  # superseded first trial counts as one probe
        assert o.f_calls == 2

    def test_no_rescale_for_zero_mu(self):
        p = scalar_problem(lambda t: 0.5 * t * t, lambda t: t)
        o = NoisyOracle(p, NoiseModel(), eps_f=0.0)
        g = np.array([1.0])
        res = backtrack(o, np.array([1.0]), -g, g, 0.5, CFG, mu=0.0, allow_rescale=True, eps_f=0.0)
        assert not res.took_grad_probe
        assert o.g_calls == 0
