"""Kernel registry contracts: determinism, domains, trajectories, anchors."""

import numpy as np
import pytest

from semscore.errors import (
    DomainViolation,
    NotTrajectoryCapable,
    UnknownPut,
)
from semscore.kernels import (
    PutClass,
    PutId,
    evaluate_put,
    evaluate_trajectory,
    list_puts,
    original,
    put_class,
)
from semscore.kernels.numeric import lu_det
from semscore.kernels.probabilistic import b1_analytic_mean


def midpoint(put):
    lo, hi = original(put).descriptor().input_domain
    return 0.5 * (lo + hi)


def test_registry_has_twelve_in_order():
    descs = list_puts()
    assert len(descs) == 12
    assert descs[0].id == PutId.A1
    assert [d.id.value for d in descs] == [
        "A1", "A2", "A3", "B1", "B2", "B3",
        "C1", "C2", "C3", "D1", "D2", "D3"]


def test_class_partition_three_per_class():
    by_class = {}
    for put in PutId:
        by_class.setdefault(put_class(put), []).append(put)
    assert set(by_class) == set(PutClass)
    assert all(len(v) == 3 for v in by_class.values())


@pytest.mark.parametrize("put", list(PutId))
def test_determinism_bit_identical(put):
    x = midpoint(put) + 0.1
    assert evaluate_put(put, x, seed=11) == evaluate_put(put, x, seed=11)


@pytest.mark.parametrize("put", list(PutId))
def test_outputs_finite_across_domain(put):
    prog = original(put)
    lo, hi = prog.descriptor().input_domain
    xs = np.linspace(lo, hi, 17)
    out = prog.evaluate(xs, seed=3)
    assert np.all(np.isfinite(out))


def test_domain_violation_raises():
    lo, hi = original("A3").descriptor().input_domain
    with pytest.raises(DomainViolation):
        evaluate_put("A3", hi + 0.5)


def test_unknown_put_raises():
    with pytest.raises(UnknownPut):
        evaluate_put("Z9", 0.0)


# golden regression fixtures: frozen reference outputs at domain midpoints
GOLDEN = {
    "A1": 0.7491538609573432,
    "A2": 8.896629581442015,
    "A3": 0.6004982202282377,
}


@pytest.mark.parametrize("put,expected", sorted(GOLDEN.items()))
def test_midpoint_golden_values(put, expected):
    assert evaluate_put(put, midpoint(put), seed=0) == pytest.approx(
        expected, rel=1e-12)


def test_trajectory_capability_set():
    capable = {d.id.value for d in list_puts() if d.trajectory_capable}
    assert capable == {"A1", "A3", "B2", "C3", "D1"}


def test_trajectory_first_element_is_initial_observable():
    traj = evaluate_trajectory("A1", 0.7, seed=0, steps=2)
    assert traj.shape == (2,)
    assert traj[0] == 21.0  # the launch height is input-independent


def test_trajectory_last_element_matches_scalar():
    for put in ("A1", "A3"):
        x = midpoint(put) + 0.2
        traj = evaluate_trajectory(put, x, seed=4, steps=11)
        assert traj[-1] == evaluate_put(put, x, seed=4)
    # the trained kernels snapshot their final state exactly
    for put in ("C3", "D1"):
        x = 0.3
        traj = evaluate_trajectory(put, x, seed=4, steps=9)
        assert traj[-1] == pytest.approx(evaluate_put(put, x, seed=4),
                                         abs=1e-12)


def test_trajectory_rejected_for_scalar_kernels():
    with pytest.raises(NotTrajectoryCapable):
        evaluate_trajectory("B1", 1.0, steps=10)


def test_b2_scalar_is_kept_chain_mean():
    from semscore.kernels.probabilistic import B2_REFERENCE
    full_len = B2_REFERENCE["n_burn"] + B2_REFERENCE["n_keep"] + 1
    traj = evaluate_trajectory("B2", 1.2, seed=5, steps=full_len)
    kept = traj[B2_REFERENCE["n_burn"] + 1:]
    assert kept.mean() == pytest.approx(evaluate_put("B2", 1.2, seed=5),
                                        rel=1e-12)


def test_a1_richardson_order_at_least_3_5():
    prog = original("A1")
    xs = np.array([0.6, 1.1])
    ref = prog.refined(4).evaluate(xs)
    errs = [np.sqrt(np.mean((prog.refined(l).evaluate(xs) - ref) ** 2))
            for l in range(3)]
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 3.5


def test_a2_lu_reproduces_diagonal_determinant():
    diag = np.diag([2.0, -3.0, 0.5, 7.0, 1.25])
    expected = float(np.prod(np.diag(diag)))
    assert lu_det(diag) == pytest.approx(expected, rel=1e-12)
    # pivoting bookkeeping keeps the sign on a permuted system
    perm = diag[[1, 0, 2, 3, 4]]
    assert lu_det(perm) == pytest.approx(-expected, rel=1e-12)


def test_b1_matches_analytic_posterior_mean():
    xs = np.array([0.5, 1.0, 2.0, 6.0])
    prog = original("B1")
    got = prog.evaluate(xs, seed=0)
    want = b1_analytic_mean(xs)
    assert np.max(np.abs(got - want)) < 1e-12


def test_stochastic_kernels_vary_with_seed():
    for put in ("B2", "B3", "C3", "D1"):
        x = midpoint(put) + 0.15
        a = evaluate_put(put, x, seed=1)
        b = evaluate_put(put, x, seed=2)
        assert a != b


def test_deterministic_kernels_ignore_seed():
    for put in ("A1", "A2", "A3", "B1", "C1", "C2", "D2", "D3"):
        x = midpoint(put) + 0.15
        assert evaluate_put(put, x, seed=1) == evaluate_put(put, x, seed=99)
