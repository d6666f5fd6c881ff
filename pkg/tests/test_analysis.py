from __future__ import annotations

from dataclasses import replace
from math import pi

import numpy as np
import pytest


def test_variance_scan_diagonal():
    from squeeze_tools import variance_scan

    scan = variance_scan(np.array([[4.0, 0.0], [0.0, 1.0]]))
    assert scan.var_min == pytest.approx(1.0)
    assert scan.var_max == pytest.approx(4.0)
    assert scan.theta_min == pytest.approx(0.0)
    assert scan.theta_max == pytest.approx(pi / 2)
    assert not scan.degenerate


def test_variance_scan_correlated():
    from squeeze_tools import variance_scan

    # Var[S^theta] = 2 + sin(2 theta)
    cov = np.array([[2.0, 1.0], [1.0, 2.0]])
    scan = variance_scan(cov)
    assert scan.var_min == pytest.approx(1.0)
    assert scan.var_max == pytest.approx(3.0)
    assert scan.theta_min == pytest.approx(3 * pi / 4)
    assert scan.theta_max == pytest.approx(pi / 4)

    grid = np.linspace(0, pi, 180, endpoint=False)
    on_grid = variance_scan(cov, grid, method="grid")
    assert on_grid.var_min == pytest.approx(1.0)
    assert on_grid.theta_min == pytest.approx(3 * pi / 4)
    assert on_grid.on_grid.shape == (180,)
    assert on_grid.on_grid == pytest.approx(2 + np.sin(2 * grid))

    # the grid never beats the exact minimum
    coarse = variance_scan(cov, np.linspace(0, pi, 7, endpoint=False), method="grid")
    assert coarse.var_min >= scan.var_min


def test_variance_scan_normalized():
    from squeeze_tools import variance_scan

    cov = np.tile(np.eye(2) * 25.0, (3, 1, 1))
    scan = variance_scan(cov, n_atoms=100)
    assert scan.var_min == pytest.approx([1.0, 1.0, 1.0])
    assert scan.degenerate.all()
    assert scan.theta_min == pytest.approx([0.0, 0.0, 0.0])
    assert scan.theta_max == pytest.approx([pi / 2] * 3)


def test_variance_scan_domain():
    from squeeze_tools import DomainError, variance_scan

    with pytest.raises(DomainError):
        variance_scan(np.eye(2), method="grid")

    with pytest.raises(DomainError):
        variance_scan(np.eye(2), method="newton")

    with pytest.raises(DomainError):
        variance_scan(np.eye(3))


def test_readout_after_rotation(rng):
    from squeeze_tools.analysis import project, readout_after_rotation

    vectors = rng.normal(size=(10, 3))
    assert readout_after_rotation(vectors, 0.7) == pytest.approx(project(vectors, 0.7))


def test_squeezing_parameter():
    from squeeze_tools import DomainError, squeezing_parameter

    value = squeezing_parameter(1.0, 5.0, 100)
    assert value.xi2 == pytest.approx(4.0)
    assert value.db == pytest.approx(-6.0206, abs=1e-4)
    assert not value.divergent

    value = squeezing_parameter(1.0, 0.0, 100)
    assert value.xi2 == np.inf
    assert value.divergent

    values = squeezing_parameter(np.array([25.0, 2.5]), np.array([50.0, 50.0]), 100)
    assert values.xi2 == pytest.approx([1.0, 0.1])
    assert values.db == pytest.approx([0.0, 10.0])

    with pytest.raises(DomainError):
        squeezing_parameter(1.0, 5.0, 0)


def test_shot_records():
    from squeeze_tools import DomainError, ShotRecord, ShotTable

    record = ShotRecord(0.0, 0.0, 10.0, -10.0, 20, 20)
    table = ShotTable.from_records([record, record])
    assert len(table) == 2
    assert table[1] == record
    assert list(table) == [record, record]
    assert table.n_atoms.tolist() == [40, 40]

    with pytest.raises(DomainError):
        ShotRecord(0.0, 0.0, 10.5, 0.0, 20, 20)

    with pytest.raises(DomainError):
        ShotRecord(0.0, 0.0, 0.0, 0.0, 0, 20)

    with pytest.raises(DomainError):
        ShotTable(
            t=np.zeros(2),
            theta=np.zeros(2),
            s_a=np.zeros(3),
            s_b=np.zeros(2),
            n_a=np.ones(2, dtype=int),
            n_b=np.ones(2, dtype=int),
        )


def test_subsystem_variance(rng):
    from squeeze_tools import DomainError, ShotRecord, ShotTable, subsystem_variance
    from squeeze_tools.tests import product_shots

    shots = product_shots(rng, 4000)
    result = subsystem_variance(shots)
    # independent halves: Var[a + b] = Var[a - b] = 2 * 500 / 4
    assert result.var_sum == pytest.approx(250, rel=0.1)
    assert result.var_diff == pytest.approx(250, rel=0.1)
    assert result.var_sum == pytest.approx(result.var_diff, rel=0.15)

    records = list(shots)[:100]
    assert subsystem_variance(records) == subsystem_variance(ShotTable.from_records(records))

    with pytest.raises(DomainError):
        subsystem_variance([ShotRecord(0.0, 0.0, 0.0, 0.0, 2, 2)])


def test_correlated_halves():
    from squeeze_tools import ShotTable, subsystem_variance

    s = np.array([-3.0, 1.0, 2.0, 0.0])
    shots = ShotTable(
        t=np.zeros(4),
        theta=np.zeros(4),
        s_a=s,
        s_b=s,
        n_a=np.full(4, 10),
        n_b=np.full(4, 10),
    )
    result = subsystem_variance(shots)
    assert result.var_diff == 0
    assert result.var_sum == pytest.approx(4 * np.var(s, ddof=1))


def test_shot_noise_subtract():
    from squeeze_tools import DomainError, shot_noise_subtract

    result = shot_noise_subtract(300.0, 100.0, 1000)
    assert result.value == pytest.approx(0.8)
    assert not result.negative

    result = shot_noise_subtract(100.0, 300.0, 1000)
    assert result.value == pytest.approx(-0.8)
    assert result.negative

    with pytest.raises(DomainError):
        shot_noise_subtract(1.0, 0.0, 0)


def test_jackknife():
    from squeeze_tools import DomainError, jackknife

    data = np.arange(10.0)
    result = jackknife(data, np.mean)
    assert result.estimate == pytest.approx(4.5)
    # leave-one-out jackknife of the mean is the standard error
    assert result.error == pytest.approx(np.std(data, ddof=1) / np.sqrt(10))

    blocked = jackknife(data, np.mean, blocks=5)
    assert blocked.estimate == pytest.approx(4.5)
    assert blocked.error > 0

    pairs = np.stack([data, 2 * data], axis=1)
    result = jackknife(pairs, lambda x: x.mean(axis=0))
    assert result.estimate == pytest.approx([4.5, 9.0])
    assert result.error[1] == pytest.approx(2 * result.error[0])

    with pytest.raises(DomainError):
        jackknife(data[:2], np.mean)

    for blocks in (1, 11):
        with pytest.raises(DomainError):
            jackknife(data, np.mean, blocks=blocks)


def test_inject_phase_noise(rng):
    from squeeze_tools import DomainError, inject_phase_noise

    totals = np.zeros((20000, 3, 3))
    totals[..., 0] = [10.0, 4.0, 6.0]
    totals[..., 2] = 1.0

    assert np.array_equal(inject_phase_noise(totals, 0.0, rng=rng), totals)

    # an echo cancels quasi-static noise
    echoed = inject_phase_noise(totals, 0.3, rng=rng)
    assert np.allclose(echoed, totals)

    noisy = inject_phase_noise(totals, 0.3, echo=False, rng=rng)
    assert np.allclose(np.hypot(noisy[..., 0], noisy[..., 1]), totals[..., 0])
    assert np.array_equal(noisy[..., 2], totals[..., 2])
    assert noisy[:, 0, 0].mean() == pytest.approx(10 * np.exp(-0.045), rel=1e-2)

    # one phase per shot is shared by all groups
    phases = np.arctan2(noisy[..., 1], noisy[..., 0])
    assert np.allclose(phases, phases[:, :1])

    fast = inject_phase_noise(totals, 0.3, "fast", rng=rng)
    assert fast[:, 0, 0].mean() == pytest.approx(10 * np.exp(-0.045), rel=1e-2)

    with pytest.raises(DomainError):
        inject_phase_noise(totals, -1.0)

    with pytest.raises(DomainError):
        inject_phase_noise(totals, 0.1, "slow")


def test_inject_phase_noise_totals(rng):
    from squeeze_tools import TrajectoryTotals, inject_phase_noise
    from squeeze_tools.tests import coherent_totals

    run = coherent_totals(rng, 50, [0.0, 0.5])
    noisy = inject_phase_noise(run, 0.2, "fast", rng=rng)
    assert isinstance(noisy, TrajectoryTotals)
    assert noisy.counts is run.counts
    assert not np.allclose(noisy.totals, run.totals)


def test_shots_from_totals(rng):
    from squeeze_tools import (
        DomainError,
        shot_noise_subtract,
        shots_from_totals,
        subsystem_variance,
    )
    from squeeze_tools.tests import coherent_totals

    run = coherent_totals(rng, 2000, [0.0, 0.1])
    shots = shots_from_totals(run, 1, 0.0)
    assert len(shots) == 2000
    assert (shots.t == 0.1).all()
    assert (shots.n_atoms == 100).all()

    var = subsystem_variance(shots)
    assert shot_noise_subtract(var.var_diff, 0.0, 100).value == pytest.approx(1.0, rel=0.1)

    noisy = shots_from_totals(run, -1, 0.0, detection_noise=5.0, rng=rng)
    assert subsystem_variance(noisy).var_diff == pytest.approx(75, rel=0.1)

    with pytest.raises(DomainError):
        shots_from_totals(run, 2, 0.0)

    with pytest.raises(DomainError):
        shots_from_totals(run, 0, 0.0, detection_noise=-1.0)


def test_squeezing_curve_coherent(rng):
    from squeeze_tools import squeezing_curve
    from squeeze_tools.analysis import CURVE_COLUMNS
    from squeeze_tools.tests import coherent_totals

    run = coherent_totals(rng, 2000, [0.0, 0.1, 0.2])
    curve = squeezing_curve(run.moments(), blocks=20)
    assert len(curve) == 3
    assert curve.spin_length == pytest.approx(1.0)
    assert curve.var_min == pytest.approx(1.0, rel=0.1)
    assert curve.xi2 == pytest.approx(curve.var_min)
    assert (curve.var_max >= curve.var_min).all()
    assert tuple(curve.columns()) == CURVE_COLUMNS

    errors = curve.error("xi2")
    assert np.isfinite(errors).all()
    assert (errors > 0).all()
    assert (curve.error("spin_length") == 0).all()

    diff = squeezing_curve(run.moments(), difference=True)
    assert diff.var_min == pytest.approx(1.0, rel=0.1)

    grid = np.linspace(0, pi, 30, endpoint=False)
    coarse = squeezing_curve(run.moments(), grid, method="grid")
    assert (coarse.var_min >= curve.var_min - 1e-12).all()


def test_squeezing_curve_blocks(rng, chain, couplings):
    from squeeze_tools import DomainError, oracle_moments, squeezing_curve
    from squeeze_tools.tests import coherent_totals

    run = coherent_totals(rng, 10, [0.0])
    with pytest.raises(DomainError):
        squeezing_curve(run.moments(), blocks=11)

    with pytest.raises(DomainError):
        squeezing_curve(replace(run.moments(), totals=None), blocks=5)

    exact = oracle_moments(chain, couplings, [0.0, 0.1])

    curve = squeezing_curve(exact)
    assert (curve.error("db") == 0).all()


def test_halves_identity_within_jackknife(rng):
    from squeeze_tools import jackknife
    from squeeze_tools.tests import product_shots

    shots = product_shots(rng, 10_000)
    pairs = np.stack([shots.s_a + shots.s_b, shots.s_a - shots.s_b], axis=1)
    def excess(d):
        return np.var(d[:, 0], ddof=1) - np.var(d[:, 1], ddof=1)

    gap = jackknife(pairs, excess, blocks=50)
    assert gap.error > 0
    assert abs(gap.estimate) <= 4 * gap.error


def test_detection_noise_subtraction(rng):
    from squeeze_tools import jackknife, shot_noise_subtract, subsystem_variance
    from squeeze_tools.tests import product_shots

    n_half, n_atoms = 500, 1000
    # detection noise of half the projection noise of the difference
    detection = np.sqrt(n_half / 8)
    atoms = product_shots(rng, 10_000, n_half, detection_noise=detection)
    empty = product_shots(rng, 10_000, n_half, variance=0.0, detection_noise=detection)

    var_atoms = subsystem_variance(atoms).var_diff
    var_empty = subsystem_variance(empty).var_diff
    assert 4 * var_empty / n_atoms == pytest.approx(0.5, rel=0.1)
    assert 4 * var_atoms / n_atoms == pytest.approx(1.5, rel=0.1)

    result = shot_noise_subtract(var_atoms, var_empty, n_atoms)
    assert not result.negative

    pairs = np.stack([atoms.s_a - atoms.s_b, empty.s_a - empty.s_b], axis=1)
    subtracted = jackknife(
        pairs,
        lambda d: shot_noise_subtract(
            np.var(d[:, 0], ddof=1), np.var(d[:, 1], ddof=1), n_atoms
        ).value,
        blocks=50,
    )
    assert abs(result.value - 1.0) <= 4 * subtracted.error


def test_phase_noise_rejection(rng):
    from squeeze_tools import inject_phase_noise
    from squeeze_tools.dtwa import DIFF, FULL
    from squeeze_tools.tests import coherent_totals

    run = coherent_totals(rng, 4000, [0.0, 0.5], n_half=200)
    n_atoms = run.n_atoms
    clean = run.moments()

    # quasi-static noise is cancelled by the echo
    static = inject_phase_noise(run, 0.1, rng=rng).moments()
    combined = np.hypot(clean.spin_length_err, static.spin_length_err)
    assert (np.abs(static.spin_length - clean.spin_length) <= combined).all()

    def readout(moments, group):
        scale = 4 / n_atoms
        return scale * moments.cov[group, :, 0, 0], scale * moments.cov_err[group, :, 0, 0]

    fast = inject_phase_noise(run, 0.1, "fast", rng=rng).moments()
    full_clean, _ = readout(clean, FULL)
    full_fast, _ = readout(fast, FULL)
    assert (full_fast >= 3 * full_clean).all()

    diff_clean, err_clean = readout(clean, DIFF)
    diff_fast, err_fast = readout(fast, DIFF)
    assert (np.abs(diff_fast - diff_clean) <= np.hypot(err_clean, err_fast)).all()
