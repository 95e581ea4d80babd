"""Acceptance suite: golden values and end-to-end behavior checks.

Each test prints one ``[criterion N] PASS/FAIL`` line (visible with
``pytest -s`` or in failure output). Criterion 4 is split into its lower and
upper halves: the upper golden value 3.1875 for fixtures/ex2.json does not
match recomputation from the fixture's own matrices (the exact value is
846/288 = 2.9375, adjugate-verified in test_radius.py), so that single check
fails by design rather than being weakened; see README.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

import swdelay as sd
from swdelay.simulate import Periodic, RandomDwell, simulate

from helpers import grid_margin, lp_grid_families, random_positive_system
from test_linalg import hurwitz_three_ways, random_metzler


@contextmanager
def criterion(cid, description):
    try:
        yield
    except BaseException:
        print(f"[criterion {cid}] FAIL - {description}")
        raise
    print(f"[criterion {cid}] PASS - {description}")


def best_runtime(fn, repeats=3):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def test_criterion_1_example1_certificate(ex1):
    with criterion(1, "hand certificate (2,5) has margin 2.2196, < 10 ms"):
        ok, slacks = sd.verify_certificate(ex1.system, [2.0, 5.0])
        assert ok
        assert float(slacks.min()) == pytest.approx(2.2196, abs=1e-4)
        runtime = best_runtime(
            lambda: sd.verify_certificate(ex1.system, [2.0, 5.0]))
        assert runtime < 0.010


def test_criterion_2_example1_theorem2_bounds(ex1):
    with criterion(2, "LP lower >= 0.4439 hand ratio, upper 2.0323, < 100 ms"):
        ok, slacks = sd.verify_certificate(ex1.system, [2.0, 5.0])
        assert ok
        hand_ratio = float(slacks.min()) / 5.0
        assert hand_ratio == pytest.approx(0.4439, abs=1e-4)
        report = sd.radius_bounds_theorem2(ex1.system, ex1.perturbation)
        assert report.lower is not None
        assert report.lower >= hand_ratio - 1e-12
        assert report.upper == pytest.approx(2.0323, abs=1e-3)
        runtime = best_runtime(
            lambda: sd.radius_bounds_theorem2(ex1.system, ex1.perturbation))
        assert runtime < 0.100


def test_criterion_3_example1_subsystem_radii(ex1):
    with criterion(3, "subsystem radii 2.0323 (k=2) and 2.4894 (k=1)"):
        lo2, hi2 = sd.subsystem_radius_positive(ex1.system.subsystems[1],
                                                ex1.perturbation.quads[1])
        assert lo2 == hi2
        assert hi2 == pytest.approx(2.0323, abs=1e-3)
        lo1, hi1 = sd.subsystem_radius_positive(ex1.system.subsystems[0],
                                                ex1.perturbation.quads[0])
        assert lo1 == hi1
        assert hi1 == pytest.approx(2.4894, abs=1e-3)


def test_criterion_4_example2_corollary5_lower(ex2):
    with criterion("4a", "second example lower bound 0.6008, < 50 ms"):
        report = sd.radius_bounds_corollary5(ex2.system, ex2.bound)
        assert report.lower == pytest.approx(0.6008, abs=1e-3)
        runtime = best_runtime(
            lambda: sd.radius_bounds_corollary5(ex2.system, ex2.bound))
        assert runtime < 0.050


def test_criterion_4_example2_corollary5_upper(ex2):
    # Golden value 3.1875; recomputation from the fixture's matrices gives
    # exactly 846/288 = 2.9375 (independently adjugate-verified), so this
    # check is expected to fail; kept as stated rather than loosened.
    with criterion("4b", "second example upper bound equals golden 3.1875"):
        report = sd.radius_bounds_corollary5(ex2.system, ex2.bound)
        assert report.upper == pytest.approx(3.1875, abs=1e-3)


def test_criterion_5_stable_perturbed_runs(ex1):
    with criterion(5, "100 perturbed runs at 0.99 x lower bound decay, "
                      "< 30 s"):
        t_start = time.perf_counter()
        report = sd.radius_bounds_theorem2(ex1.system, ex1.perturbation)
        target = 0.99 * report.lower
        delays = tuple(tuple(d for d, _ in s.discrete)
                       for s in ex1.system.subsystems)
        history = np.array([1.0, 1.0])
        for dist_seed in range(20):
            dist = sd.sample_disturbance(ex1.perturbation, target,
                                         dist_seed, jump_delays=delays)
            assert sd.disturbance_norm(dist) == pytest.approx(target,
                                                              abs=1e-9)
            perturbed = sd.apply(ex1.system, ex1.perturbation, dist)
            cert = sd.find_common_lclf(perturbed)
            assert cert is not None
            for sig_seed in range(5):
                traj = simulate(perturbed, history,
                                RandomDwell(0.1, 2.0, sig_seed), 30.0, 0.005)
                assert not traj.diverged
                assert np.abs(traj.final_state).max() < 1e-4
                assert sd.decay_envelope_check(traj, cert, 1.0)
        assert time.perf_counter() - t_start < 30.0


def test_criterion_6_instability_reproduction(ex1, ex1_big_path):
    with criterion(6, "listed disturbance destabilizes the periodic run"):
        from swdelay.sysfile import load_disturbance_file
        dist = load_disturbance_file(ex1_big_path, 2)
        assert sd.disturbance_norm(dist) >= 2.0323
        perturbed = sd.apply(ex1.system, ex1.perturbation, dist)
        traj = simulate(perturbed, np.array([1.0, 1.0]),
                        Periodic(((0, 2.0), (1, 1.0))), 30.0, 0.005)
        initial = np.abs(traj.states[0]).max()
        final = np.abs(traj.final_state).max()
        assert traj.diverged or final > initial


def test_criterion_7a_lp_grid_agreement():
    with criterion("7a", "LP vs grid oracle agrees on 100 random families"):
        agreed = 0
        for envs, t_star in lp_grid_families(seed=70, count=100):
            grid_feasible = grid_margin(envs) > 1e-9
            assert (t_star > 1e-9) == grid_feasible
            agreed += 1
        assert agreed == 100


def test_criterion_7b_three_way_hurwitz():
    with criterion("7b", "three Hurwitz tests agree on 100 Metzler samples"):
        rng = np.random.default_rng(71)
        checked = 0
        while checked < 100:
            n = int(rng.integers(2, 7))
            verdicts = hurwitz_three_ways(random_metzler(rng, n))
            if verdicts is None:
                continue
            assert verdicts[0] == verdicts[1] == verdicts[2]
            checked += 1


def test_criterion_7c_fourth_order_convergence():
    with criterion("7c", "error shrinks >= 8x per halving, 3 halvings"):
        sub = sd.DelaySubsystem(np.array([[0.0]]),
                                ((1.0, np.array([[-1.0]])),))
        sys = sd.SwitchedDelaySystem(1, 1.0, (sub,))
        exact = 1.0 - math.sin(1.0)      # x(1) for history cos(theta)
        errs = []
        for dt in (0.1, 0.05, 0.025, 0.0125):
            traj = simulate(sys, lambda th: np.array([math.cos(th)]),
                            sd.Constant(0), 1.0, dt)
            errs.append(abs(traj.final_state[0] - exact))
        for coarse, fine in zip(errs, errs[1:]):
            assert coarse / fine >= 8.0


def test_criterion_7d_positivity_on_random_systems():
    with criterion("7d", "positivity holds on 50 random positive systems"):
        rng = np.random.default_rng(72)
        for i in range(50):
            n = int(rng.integers(2, 4))
            big_n = int(rng.integers(1, 4))
            sys = random_positive_system(rng, n, big_n, delays=(0.2, 0.4),
                                         kernel=bool(i % 2))
            history = rng.uniform(0.0, 1.0, size=n)
            traj = simulate(sys, history, RandomDwell(0.1, 0.8, i),
                            6.0, 0.02)
            assert sd.positivity_check(traj)


def test_criterion_7e_sandwich_on_reports():
    with criterion("7e", "lower <= upper on every generated radius report"):
        from helpers import random_dominated_family
        rng = np.random.default_rng(73)
        for _ in range(25):
            n = int(rng.integers(2, 5))
            big_n = int(rng.integers(1, 4))
            sys, bound = random_dominated_family(rng, n, big_n)
            p = sd.PerturbationStructure.unstructured(n, big_n)
            rep = sd.radius_bounds_theorem2(sys, p)
            assert rep.lower is not None and rep.upper is not None
            assert rep.lower <= rep.upper + 1e-9
            rep5 = sd.radius_bounds_corollary5(sys, bound)
            assert rep5.lower <= rep5.upper + 1e-9
