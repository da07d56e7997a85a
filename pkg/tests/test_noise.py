import numpy as np
import pytest

from qnbench.noise import NoiseModel, NoisyOracle, OracleError, default_eps_f
from qnbench.problems import get_problem, make_illcond_quadratic


def test_default_eps_f_table():
    assert default_eps_f(NoiseModel(kind="exact")) == 0.0
    assert default_eps_f(NoiseModel(kind="additive_uniform", level=1e-3)) == 1e-2
    assert default_eps_f(NoiseModel(kind="precision_cast", bits=64)) == 2.22e-9
    assert default_eps_f(NoiseModel(kind="precision_cast", bits=32)) == 1.19e-3
    assert default_eps_f(NoiseModel(kind="precision_cast", bits=16)) == 9.77e-2


def test_exact_model_passthrough():
    o = NoisyOracle(get_problem("sphere_n2"), NoiseModel())
    assert o.f_bar(np.array([3.0, 4.0])) == 12.5
    assert o.grad_bar(np.array([3.0, 4.0])) == pytest.approx([3.0, 4.0])
    assert o.eps_f == 0.0


def test_additive_uniform_objective_bound():
    p = get_problem("sphere_n2")
    o = NoisyOracle(p, NoiseModel(kind="additive_uniform", level=1e-3, seed=3))
    x = np.array([0.5, -0.25])
    clean = p.f(x)
    draws = [o.f_bar(x) for _ in range(300)]
    errs = np.abs(np.array(draws) - clean)
    assert np.all(errs <= 1e-3)
    assert errs.max() > 1e-4  # noise actually present


def test_additive_uniform_satisfies_error_model():
    # with level <= eps_f every call obeys |fbar - f| <= eps_f * max(1, |f|)
    p = get_problem("rosenbrock_n2")
    model = NoiseModel(kind="additive_uniform", level=1e-3, seed=11)
    o = NoisyOracle(p, model)
    assert o.eps_f == 1e-2
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = p.x0 + rng.standard_normal(2)
        clean = p.f(x)
        assert abs(o.f_bar(x) - clean) <= o.eps_f * max(1.0, abs(clean))


def test_additive_uniform_gradient_percomp():
    p = get_problem("sphere_n10")
    o = NoisyOracle(p, NoiseModel(kind="additive_uniform", level=1e-3, seed=5))
    x = p.x0
    clean = p.grad(x)
    noise = o.grad_bar(x) - clean
    assert float(np.abs(noise).max()) <= 1e-3
    assert len(np.unique(noise)) > 1  # independent per-component draws


def test_additive_uniform_gradient_rank1():
    p = get_problem("sphere_n10")
    o = NoisyOracle(p, NoiseModel(kind="additive_uniform", level=1e-3, seed=5, grad_mode="rank1"))
    noise = o.grad_bar(p.x0) - p.grad(p.x0)
    assert float(np.abs(noise).max()) <= 1e-3
    assert len(np.unique(noise)) == 1  # one shared draw


def test_identical_seed_and_call_sequence_is_bit_identical():
    p = get_problem("beale_n2")
    model = NoiseModel(kind="additive_uniform", level=1e-2, seed=123)
    a, b = NoisyOracle(p, model), NoisyOracle(p, model)
    x = p.x0
    seq_a = [a.f_bar(x), *a.grad_bar(x), a.f_bar(x), *a.grad_bar(x)]
    seq_b = [b.f_bar(x), *b.grad_bar(x), b.f_bar(x), *b.grad_bar(x)]
    assert seq_a == seq_b


def test_different_seed_differs():
    p = get_problem("beale_n2")
    a = NoisyOracle(p, NoiseModel(kind="additive_uniform", level=1e-2, seed=1))
    b = NoisyOracle(p, NoiseModel(kind="additive_uniform", level=1e-2, seed=2))
    assert a.f_bar(p.x0) != b.f_bar(p.x0)


def test_counters_increment_once_per_call():
    o = NoisyOracle(get_problem("sphere_n2"), NoiseModel())
    x = np.array([1.0, 1.0])
    assert (o.f_calls, o.g_calls) == (0, 0)
    o.f_bar(x)
    o.f_bar(x)
    o.grad_bar(x)
    assert (o.f_calls, o.g_calls) == (2, 1)
    assert o.oracle_calls == 3


def test_precision_cast_binary16_rounding():
    o = NoisyOracle(get_problem("sphere_n2"), NoiseModel(kind="precision_cast", bits=16))
    # 1 + 2^-12 is below half an ulp of 1.0 in binary16, so it rounds to 1.0
    assert o.f_bar(np.array([1.0 + 2.0**-12, 0.0])) == 0.5
    clean = 0.5 * (1.0 + 2.0**-12) ** 2
    assert abs(o.f_bar(np.array([1.0 + 2.0**-12, 0.0])) - clean) <= 9.77e-2 * max(1.0, clean)


def test_precision_cast_binary32_representable_input():
    o = NoisyOracle(make_illcond_quadratic(2), NoiseModel(kind="precision_cast", bits=32))
    assert np.all(o.grad_bar(np.array([1.0, 1.0])) == np.array([1.0, 2.0]))


def test_precision_cast_binary64_is_identity():
    p = get_problem("rosenbrock_n2")
    o = NoisyOracle(p, NoiseModel(kind="precision_cast", bits=64))
    assert o.f_bar(p.x0) == p.f(p.x0)


def test_precision_cast_overflow_raises():
    o = NoisyOracle(get_problem("sphere_n2"), NoiseModel(kind="precision_cast", bits=16))
    with pytest.raises(OracleError) as exc:
        o.f_bar(np.array([1e6, 0.0]))
    assert exc.value.kind == "precision_cast"
    assert exc.value.x is not None


def test_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(kind="gaussian")
    with pytest.raises(ValueError):
        NoiseModel(kind="additive_uniform", level=0.0)
    with pytest.raises(ValueError):
        NoiseModel(kind="precision_cast", bits=8)
    with pytest.raises(ValueError):
        NoiseModel(grad_mode="weird")
    with pytest.raises(ValueError):
        NoiseModel(seed=-1)


def test_eps_f_range_checked():
    with pytest.raises(ValueError):
        NoisyOracle(get_problem("sphere_n2"), NoiseModel(), eps_f=1.0)
    with pytest.raises(ValueError):
        NoisyOracle(get_problem("sphere_n2"), NoiseModel(), eps_f=-0.1)
