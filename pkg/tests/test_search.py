import numpy as np
import pytest

from gybo.search import (AnsatzFamily, family_for_case, get_family, manifold_probe, minimize,
                         residual)


def test_residual_examples():
    f = get_family("U3")
    a = 1 / np.sqrt(5)
    assert residual(f, [a, a, a]) < 1e-20
    assert residual(f, [0, 0, 0]) == 0
    assert residual(f, [0.3, 0.3, 0.3]) > 0


def test_residual_is_not_scale_invariant():
    f = get_family("U3sym")
    a = 1 / np.sqrt(5)
    R = f.build([a])
    g = AnsatzFamily("scaled", lambda p: p[0] * R, ("c",), (False,), (2, 5, 1))
    assert residual(g, [1]) < 1e-20 and residual(g, [2]) < 1e-18
    assert residual(f, [0.3]) != residual(g, [0.3])


def test_wrong_parameter_count():
    with pytest.raises(ValueError):
        residual(get_family("U3"), [0.1])


def test_minimize_u3_symmetric():
    res = minimize(get_family("U3sym"), [0.3])
    assert res.converged
    assert abs(abs(res.params[0]) - 1 / np.sqrt(5)) < 1e-6
    assert res.matched_target is not None


def test_minimize_un4():
    res = minimize(get_family("Un", 4), [0.5])
    assert abs(abs(res.params[0]) - 1 / np.sqrt(8)) < 1e-6


def test_minimize_from_target_takes_no_steps():
    res = minimize(get_family("U3sym"), [-1 / np.sqrt(5)])
    assert res.iterations == 0 and res.converged
    assert res.matched_target[0] == 1


def test_minimize_is_deterministic_and_never_worse():
    f = get_family("U3")
    start = [0.2, 0.5, 0.4]
    a, b = minimize(f, start, max_iter=60), minimize(f, start, max_iter=60)
    assert a == b
    assert a.residual <= residual(f, start)


def test_budget_exhaustion_does_not_raise():
    res = minimize(get_family("ansatz242"), [0.3] * 7, max_iter=5)
    assert not res.converged and res.iterations <= 5


def test_real_only_stays_real():
    res = minimize(get_family("U3sym"), [0.3])
    assert res.params[0].imag == 0


def test_ansatz_targets_are_solutions():
    f = get_family("ansatz242")
    assert len(f.known_targets) >= 8
    for t in f.known_targets:
        assert residual(f, t) < 1e-18


def test_manifold_probes():
    assert manifold_probe(get_family("P1"), 100, 3).pass_fraction == 1.0
    assert manifold_probe(get_family("P2"), 100, 3).pass_fraction == 1.0
    assert manifold_probe(get_family("P2-gamma0"), 100, 3).pass_fraction == 0.0
    a = manifold_probe(get_family("P1"), 20, 9)
    assert a == manifold_probe(get_family("P1"), 20, 9)


def test_family_lookup():
    assert family_for_case("P1").name == "P1"
    assert family_for_case("5B") is None
    with pytest.raises(KeyError):
        get_family("nope")
