import numpy as np
import pytest

from swdelay.errors import NotPositiveBound
from swdelay.linalg import is_metzler
from swdelay.model import (DelaySubsystem, DistributedKernel,
                           SwitchedDelaySystem, characteristic_at_zero,
                           dominates, envelope_matrix, is_positive_system,
                           variation_matrix)

from helpers import random_positive_system

B1 = np.array([[0.6321, 0.3507], [1.0315, 0.2403]])
P1_AT_0 = np.array([[-4.39, 0.6038], [2.0418, -2.7702]])
P2_AT_0 = np.array([[-2.9993, 0.7558], [1.2327, -2.3429]])
H0 = np.array([[-11.0, 4.0, 4.0], [6.0, -11.0, 4.0], [7.0, 3.0, -8.0]])


def test_variation_single_jump(ex1):
    assert np.allclose(variation_matrix(ex1.system.subsystems[0]), B1,
                       atol=1e-15)


def test_variation_no_delays():
    s = DelaySubsystem(np.array([[-1.0, 0.5], [0.0, -2.0]]))
    assert np.array_equal(variation_matrix(s), np.zeros((2, 2)))


def test_variation_bound_kernel_integral(ex2):
    expected = np.array([[4.0, 0.0, 2.0], [2.0, 2.0, 0.0], [4.0, 0.0, 2.0]])
    assert np.abs(ex2.bound.kernel.abs_integral() - expected).max() < 1e-14


def test_envelope_example1(ex1):
    assert np.abs(envelope_matrix(ex1.system.subsystems[0]) -
                  P1_AT_0).max() < 1e-12
    assert np.abs(envelope_matrix(ex1.system.subsystems[1]) -
                  P2_AT_0).max() < 1e-12


def test_envelope_no_delays():
    s = DelaySubsystem(-np.eye(2))
    assert np.array_equal(envelope_matrix(s), -np.eye(2))


def test_characteristic_at_zero(ex1, ex2):
    assert np.abs(characteristic_at_zero(ex1.system.subsystems[1]) +
                  P2_AT_0).max() < 1e-12
    s = DelaySubsystem(-np.eye(2))
    assert np.array_equal(characteristic_at_zero(s), np.eye(2))
    assert np.abs(characteristic_at_zero(ex2.bound) + H0).max() < 1e-12


def test_is_positive_system(ex1, ex2):
    assert is_positive_system(ex1.system.subsystems[0])
    assert is_positive_system(ex2.system.subsystems[0])
    assert is_positive_system(ex2.system.subsystems[1])
    bad = DelaySubsystem(np.array([[-1.0, -0.5], [0.0, -1.0]]))
    assert not is_positive_system(bad)


def test_dominates(ex2):
    bound = ex2.bound
    assert dominates(bound, bound)
    for s in ex2.system.subsystems:
        assert dominates(bound, s)
    shrunk = DelaySubsystem(
        bound.a0 - np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0],
                             [0.0, 0.0, 2.0]]),
        bound.discrete, bound.kernel)
    assert not dominates(shrunk, bound)


def test_dominates_requires_positive_bound(ex1):
    bad = DelaySubsystem(np.array([[-1.0, -0.5], [0.0, -1.0]]))
    with pytest.raises(NotPositiveBound):
        dominates(bad, ex1.system.subsystems[0])


def test_variation_nonnegative_and_envelope_metzler():
    rng = np.random.default_rng(10)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        a0 = rng.normal(size=(n, n))
        mats = [rng.normal(size=(n, n)) for _ in range(2)]
        kern = DistributedKernel((-1.0, -0.25, 0.0),
                                 tuple(rng.normal(size=(n, n))
                                       for _ in range(3)))
        s = DelaySubsystem(a0, ((0.3, mats[0]), (0.9, mats[1])), kern)
        v = variation_matrix(s)
        assert (v >= 0.0).all()
        assert is_metzler(envelope_matrix(s))


def test_positive_envelope_equals_minus_characteristic():
    rng = np.random.default_rng(11)
    for _ in range(20):
        sys = random_positive_system(rng, 3, 2, kernel=True)
        for s in sys.subsystems:
            assert np.abs(envelope_matrix(s) +
                          characteristic_at_zero(s)).max() < 1e-12


def test_variation_invariant_under_sign_flip():
    rng = np.random.default_rng(12)
    a0 = rng.normal(size=(3, 3))
    mats = [rng.normal(size=(3, 3)) for _ in range(2)]
    s_pos = DelaySubsystem(a0, ((0.5, mats[0]), (1.0, mats[1])))
    s_neg = DelaySubsystem(a0, ((0.5, -mats[0]), (1.0, -mats[1])))
    assert np.array_equal(variation_matrix(s_pos), variation_matrix(s_neg))


def test_kernel_abs_integral_sign_change():
    # B(theta) = theta + 1 on [-2, 0]: integral of |B| is exactly 1
    kern = DistributedKernel((-2.0, 0.0),
                             (np.array([[-1.0]]), np.array([[1.0]])))
    assert abs(kern.abs_integral()[0, 0] - 1.0) < 1e-14
    assert abs(kern.integral()[0, 0] - 0.0) < 1e-14


def test_kernel_value_interpolation(ex2):
    kern = ex2.bound.kernel
    # entry (3,3) is theta + 2 on [-2, 0]
    assert kern.value_at(-1.0)[2, 2] == pytest.approx(1.0)
    assert kern.value_at(-0.5)[2, 2] == pytest.approx(1.5)
    assert kern.value_at(0.0)[2, 2] == pytest.approx(2.0)


def test_kernel_validation():
    with pytest.raises(ValueError):
        DistributedKernel((-1.0,), (np.eye(2),))
    with pytest.raises(ValueError):
        DistributedKernel((-1.0, -0.5), (np.eye(2), np.eye(2)))
    with pytest.raises(ValueError):
        DistributedKernel((0.0, 1.0), (np.eye(2), np.eye(2)))


def test_subsystem_validation():
    with pytest.raises(ValueError):
        DelaySubsystem(np.ones((2, 3)))
    with pytest.raises(ValueError):
        DelaySubsystem(-np.eye(2), ((0.5, np.eye(2)), (0.5, np.eye(2))))
    with pytest.raises(ValueError):
        DelaySubsystem(-np.eye(2), ((-0.5, np.eye(2)),))
    with pytest.raises(ValueError):
        DelaySubsystem(np.array([[np.nan, 0.0], [0.0, -1.0]]))


def test_system_validation():
    sub = DelaySubsystem(-np.eye(2), ((1.0, 0.1 * np.eye(2)),))
    with pytest.raises(ValueError):
        SwitchedDelaySystem(2, 0.5, (sub,))   # delay exceeds h
    with pytest.raises(ValueError):
        SwitchedDelaySystem(3, 1.0, (sub,))   # dimension mismatch
    with pytest.raises(ValueError):
        SwitchedDelaySystem(2, 1.0, ())
    SwitchedDelaySystem(2, 1.0, (sub,))
