from __future__ import annotations

from dataclasses import replace
from itertools import product
from math import pi

import numpy as np
import pytest


def test_sample_initial(cube, rng):
    from squeeze_tools import sample_initial

    config = sample_initial(cube, 0.11, rng)
    # round(0.11 * 64) = 7
    assert config.hole_mask.sum() == 7
    assert config.n_atoms == 57
    assert (config.spins[config.hole_mask] == 0).all()

    atoms = config.spins[~config.hole_mask]
    assert (atoms[:, 0] == 0.5).all()
    assert set(np.unique(atoms[:, 1:])) == {-0.5, 0.5}

    config = sample_initial(cube, 0.0, rng, axis="z")
    assert (config.spins[:, 2] == 0.5).all()
    assert config.totals()[2] == 32


def test_sample_initial_domain(chain, rng):
    from squeeze_tools import DomainError, sample_initial

    with pytest.raises(DomainError):
        sample_initial(chain, 1.0, rng)

    with pytest.raises(DomainError):
        sample_initial(chain, 0.1, rng, axis="y")


def test_hole_count():
    from squeeze_tools import build_lattice
    from squeeze_tools.dtwa import hole_count

    assert hole_count(build_lattice(32), 0.05) == 2
    assert hole_count(build_lattice(10), 0.05) == 1
    assert hole_count(build_lattice(32), 0.0) == 0


def make_config(geom, holes=()):
    from squeeze_tools import SpinConfig

    spins = np.tile([0.5, 0.5, -0.5], (geom.n_sites, 1))
    spins[:, 1] *= np.where(np.arange(geom.n_sites) % 2, 1, -1)
    mask = np.zeros(geom.n_sites, dtype=bool)
    mask[list(holes)] = True
    spins[mask] = 0
    return SpinConfig(geom, spins, mask)


def test_local_field(chain, couplings):
    from squeeze_tools import DomainError, local_field

    config = make_config(chain, holes=[3])
    # site 2: neighbours 1 (spin) and 3 (hole)
    field = local_field(config, 2, couplings)
    expected = config.spins[1] * [couplings.J, couplings.J, couplings.Jz]
    expected[2] += couplings.hz
    assert np.allclose(field, expected)

    field = local_field(config, 2, couplings, enable_hz_field=False)
    assert field[2] == pytest.approx(couplings.Jz * config.spins[1, 2])

    field = local_field(config, 2, couplings, hz=2.0)
    assert field[2] == pytest.approx(couplings.Jz * config.spins[1, 2] + 2.0)

    with pytest.raises(DomainError):
        local_field(config, 3, couplings)

    with pytest.raises(DomainError):
        local_field(config, 8, couplings)


def test_precess_conserves(cube, couplings, rng):
    from squeeze_tools import precess_step, sample_initial

    config = sample_initial(cube, 0.0, rng)
    norms = np.linalg.norm(config.spins, axis=1)
    sz = config.totals()[2]
    for _ in range(50):
        config = precess_step(config, 0.01, couplings)

    assert np.allclose(np.linalg.norm(config.spins, axis=1), norms, atol=1e-6)
    assert config.totals()[2] == pytest.approx(sz, abs=1e-10)


def test_precess_keeps_holes_empty(cube, couplings, rng):
    from squeeze_tools import precess_step, sample_initial

    config = sample_initial(cube, 0.2, rng)
    moved = precess_step(config, 0.01, couplings)
    assert (moved.spins[config.hole_mask] == 0).all()
    assert np.array_equal(moved.hole_mask, config.hole_mask)
    # the input is not modified
    assert (config.spins[~config.hole_mask, 0] == 0.5).all()


def test_two_spins_short_time(couplings):
    """Exact average over every discrete two-spin configuration."""
    from squeeze_tools import SpinConfig, build_lattice, precess_step

    geom = build_lattice(2)
    dt, steps = 0.01, 30
    sx = np.zeros(steps + 1)
    signs = (-0.5, 0.5)
    for a1, b1, a2, b2 in product(signs, repeat=4):
        config = SpinConfig(geom, np.array([[0.5, a1, b1], [0.5, a2, b2]]), np.zeros(2, bool))
        sx[0] += config.totals()[0]
        for k in range(1, steps + 1):
            config = precess_step(config, dt, couplings)
            sx[k] += config.totals()[0]

    times = np.arange(steps + 1) * dt
    expected = np.cos((couplings.J - couplings.Jz) * times / 2)
    assert np.allclose(sx / 16, expected, atol=1e-3)


def test_larmor_precession(couplings):
    from squeeze_tools import SpinConfig, build_lattice, precess_step

    geom = build_lattice(2)
    hz, steps = 2.0, 100

    def precess(spin, duration):
        config = SpinConfig(geom, np.array([spin, [0.0, 0.0, 0.0]]), np.array([False, True]))
        for _ in range(steps):
            config = precess_step(config, duration / steps, couplings, hz=hz)
        return config.spins[0]

    # a quarter turn about +z takes x to y
    assert precess([0.5, 0.0, 0.0], pi / (2 * hz)) == pytest.approx([0.0, 0.5, 0.0], abs=1e-8)
    assert precess([0.5, 0.3, 0.2], pi / hz) == pytest.approx([-0.5, -0.3, 0.2], abs=1e-8)


def test_heisenberg_point_is_stationary(chain):
    from squeeze_tools import EngineConfig, SpinCouplings, run_totals

    couplings = SpinCouplings.from_ratios(1.0)
    run = run_totals(chain, couplings, EngineConfig(dt=0.05, n_steps=40), None, 16)
    # the isotropic exchange conserves the total spin of every trajectory
    assert np.allclose(run.totals[:, :, 0], run.totals[:, :1, 0], atol=1e-10)
    assert run.moments().spin_length == pytest.approx(np.ones(41))


def test_hole_spreading_grows_with_hop_rate(rng):
    from squeeze_tools import build_lattice, hole_hop_step

    geom = build_lattice(201)
    start = make_config(geom, holes=[100])

    def spread(hop_rate, walks=200, steps=50):
        total = 0.0
        for _ in range(walks):
            config = start
            for _ in range(steps):
                config = hole_hop_step(config, 0.1, hop_rate, rng)
            total += (config.holes[0] - 100) ** 2
        return total / walks

    slow, fast = spread(1.0), spread(4.0)
    # one unit step with probability hop_rate * dt per step
    assert slow == pytest.approx(5.0, rel=0.3)
    assert fast == pytest.approx(20.0, rel=0.3)
    assert fast > 2 * slow


def test_hole_hop_step(rng):
    from squeeze_tools import build_lattice, hole_hop_step

    geom = build_lattice(8)
    config = make_config(geom, holes=[0])
    moved = hole_hop_step(config, 0.1, 10.0, rng)
    assert moved.holes.tolist() == [1]
    assert np.array_equal(moved.spins[0], config.spins[1])
    assert (moved.spins[1] == 0).all()

    # zero probability is the identity
    same = hole_hop_step(config, 0.1, 0.0, rng)
    assert np.array_equal(same.spins, config.spins)

    # neighbouring holes block each other
    blocked = make_config(geom, holes=[0, 1])
    moved = hole_hop_step(blocked, 0.1, 10.0, rng)
    assert moved.hole_mask.sum() == 2
    assert moved.hole_mask[0]


def test_hole_hop_conserves_count(cube, rng):
    from squeeze_tools import hole_hop_step, sample_initial

    config = sample_initial(cube, 0.2, rng)
    atoms = config.spins[~config.hole_mask]
    for _ in range(20):
        config = hole_hop_step(config, 0.1, 5.0, rng)

    assert config.hole_mask.sum() == 13
    assert (config.spins[config.hole_mask] == 0).all()
    # atoms are only moved
    assert sorted(map(tuple, config.spins[~config.hole_mask])) == sorted(map(tuple, atoms))


def test_double_hop_step(rng):
    from squeeze_tools import build_lattice, double_hop_step

    geom = build_lattice(5)
    config = make_config(geom, holes=[0])
    moved = double_hop_step(config, 0.1, 10.0, 1.0, rng, enable_spin_flip=False)
    assert moved.holes.tolist() == [2]
    assert np.array_equal(moved.spins[0], config.spins[1])
    assert np.array_equal(moved.spins[1], config.spins[2])
    assert (moved.spins[2] == 0).all()


@pytest.mark.parametrize(
    ("rotate_site", "target", "source"), [("origin", 0, 1), ("intermediate", 1, 2)]
)
def test_double_hop_rotation(rotate_site, target, source, rng):
    from squeeze_tools import build_lattice, double_hop_step

    geom = build_lattice(5)
    config = make_config(geom, holes=[0])
    moved = double_hop_step(config, 0.1, 10.0, 1.0, rng, rotate_site=rotate_site)
    assert moved.holes.tolist() == [2]
    norm = np.linalg.norm(config.spins[source])
    assert np.linalg.norm(moved.spins[target]) == pytest.approx(norm)

    other = 1 - target
    assert np.array_equal(moved.spins[other], config.spins[other + 1])


def test_double_hop_blocked(rng):
    from squeeze_tools import build_lattice, double_hop_step

    geom = build_lattice(5)
    config = make_config(geom, holes=[0, 2])
    moved = double_hop_step(config, 0.1, 10.0, 1.0, rng)
    # the first hole is blocked by the second one
    assert moved.hole_mask[0]
    assert moved.hole_mask.sum() == 2


def test_step_domain(chain, rng):
    from squeeze_tools import DomainError, double_hop_step, hole_hop_step

    config = make_config(chain, holes=[0])
    with pytest.raises(DomainError):
        hole_hop_step(config, 0.1, 20.0, rng)

    with pytest.raises(DomainError):
        double_hop_step(config, 0.1, 1.0, 1.0, rng, rotate_site="anywhere")


def test_apply_global_rotation(chain, rng):
    from squeeze_tools import apply_global_rotation, sample_initial

    config = sample_initial(chain, 0.25, rng, axis="z")
    rotated = apply_global_rotation(config, "y", pi / 2)
    atoms = ~config.hole_mask
    assert np.allclose(rotated.spins[atoms, 0], 0.5)
    assert np.allclose(rotated.spins[atoms, 1], config.spins[atoms, 1])
    assert (rotated.spins[config.hole_mask] == 0).all()


def test_engine_config():
    from squeeze_tools import DomainError, EngineConfig, build_lattice

    chain, cube = build_lattice(8), build_lattice((3, 3, 3))
    cfg = EngineConfig(dt=0.01, hop_rate=4.2, alpha=0.5)
    hop, double, angle = cfg.probabilities(chain)
    assert hop == pytest.approx(0.042)
    assert double == pytest.approx(0.01)
    assert angle == pytest.approx(pi)
    assert cfg.probabilities(cube)[1] == pytest.approx(0.05)
    assert cfg.times[-1] == pytest.approx(2.0)

    off = EngineConfig(dt=0.01, enable_hopping=False, enable_spin_flip=False)
    assert off.probabilities(chain) == (0.0, 0.0, 0.0)

    # double hops still displace holes without the rotation
    shuffle = EngineConfig(dt=0.01, enable_spin_flip=False)
    assert shuffle.probabilities(chain)[1:] == (pytest.approx(0.01), 0.0)

    for bad in (
        {"dt": 0},
        {"n_steps": 0},
        {"hole_density": 1.0},
        {"hop_rate": 200.0},
        {"double_hop_rate": -1.0},
        {"alpha": -1},
        {"rotate_site": "anywhere"},
        {"batch_size": 0},
    ):
        with pytest.raises(DomainError):
            EngineConfig(**bad)


@pytest.fixture(scope="module")
def holes_run():
    from squeeze_tools import EngineConfig, SpinCouplings, build_lattice, run_totals

    geom = build_lattice((4, 4))
    cfg = EngineConfig(dt=0.02, n_steps=20, hole_density=0.25, batch_size=8, seed=7)
    return geom, cfg, run_totals(geom, SpinCouplings.from_ratios(-0.18, -1.1), cfg, None, 20)


def test_run_totals(holes_run):
    geom, cfg, run = holes_run
    assert len(run) == 20
    assert run.totals.shape == (20, 21, 3, 3)
    assert run.counts.shape == (20, 21, 2)
    assert run.n_atoms == 12

    # the hole count is conserved, the halves exchange atoms
    assert (run.counts.sum(axis=-1) == 12).all()
    assert np.allclose(run.totals[:, :, 0], run.totals[:, :, 1] + run.totals[:, :, 2])
    assert np.allclose(run.totals[:, 0, 0, 0], 6.0)


def test_run_deterministic(holes_run):
    from squeeze_tools import SpinCouplings, run_totals, run_trajectory

    geom, cfg, run = holes_run
    couplings = SpinCouplings.from_ratios(-0.18, -1.1)
    threaded = run_totals(geom, couplings, cfg, None, 20, threads=4)
    assert np.array_equal(threaded.totals, run.totals)
    assert np.array_equal(threaded.counts, run.counts)

    single = run_trajectory(geom, couplings, cfg, index=11)
    assert np.allclose(single.totals[0], run.totals[11], atol=1e-12)
    assert np.array_equal(single.counts[0], run.counts[11])


def test_toggles_off_freeze_holes(couplings):
    from squeeze_tools import EngineConfig, build_lattice, run_totals

    geom = build_lattice(8)
    cfg = EngineConfig(
        dt=0.02,
        n_steps=10,
        hole_density=0.25,
        enable_hopping=False,
        enable_spin_flip=False,
        enable_hz_field=False,
    )
    run = run_totals(geom, couplings, cfg, None, 10)
    assert (run.counts == run.counts[:, :1]).all()


def test_hole_free_sz_conserved(chain, couplings):
    from squeeze_tools import EngineConfig, run_totals

    cfg = EngineConfig(dt=0.02, n_steps=30)
    run = run_totals(chain, couplings, cfg, None, 8)
    sz = run.totals[:, :, 0, 2]
    assert np.allclose(sz, sz[:, :1], atol=1e-10)


def test_echo_toggling_frame(chain, couplings):
    from squeeze_tools import EngineConfig, Protocol, run_totals

    plain = run_totals(chain, couplings, EngineConfig(dt=0.02, n_steps=20), None, 6)
    echo = EngineConfig(dt=0.02, n_steps=20, echo=True)
    toggled = run_totals(chain, couplings, echo, None, 6)
    assert np.allclose(toggled.totals, plain.totals, atol=1e-12)

    lab = run_totals(chain, couplings, echo, Protocol(toggling_frame=False), 6)
    assert np.allclose(lab.totals[:, :10], plain.totals[:, :10])
    assert (lab.totals[:, -1, 0, 0] < 0).all()


def test_initial_pulse(chain, couplings):
    from squeeze_tools import EngineConfig, Protocol, run_totals

    cfg = EngineConfig(dt=0.02, n_steps=2)
    run = run_totals(chain, couplings, cfg, Protocol(initial_pulse=True), 4)
    assert np.allclose(run.totals[:, 0, 0, 0], 4.0)


def test_ensemble_moments(chain, couplings):
    from squeeze_tools import DomainError, EngineConfig, run_ensemble, run_totals

    cfg = EngineConfig(dt=0.02, n_steps=10)
    moments = run_ensemble(chain, couplings, cfg, None, 64, frame="lab")
    assert moments.mean.shape == (4, 11, 3)
    assert moments.cov.shape == (4, 11, 2, 2)
    assert moments.atoms.shape == (11, 2)
    assert moments.spin_length[0] == pytest.approx(1.0)
    assert moments.spin_length_err[0] == 0
    assert np.allclose(moments.cov, moments.cov.swapaxes(-1, -2))
    assert moments.group("diff") == 3

    with pytest.raises(DomainError):
        moments.group("c")

    with pytest.raises(DomainError):
        run_totals(chain, couplings, cfg, None, 1)


def test_mean_frame_follows_precession(rng):
    from squeeze_tools import DomainError
    from squeeze_tools.tests import coherent_totals

    run = coherent_totals(rng, 400, [0.0, 1.0])
    precessed = run.rotated(np.array([0.0, -0.7]))
    assert precessed.azimuth[1] == pytest.approx(0.7, abs=0.02)

    lab = precessed.moments()
    assert lab.spin_length[1] == pytest.approx(np.cos(0.7), abs=0.02)

    mean = precessed.moments("mean")
    assert mean.spin_length == pytest.approx([1.0, 1.0], abs=1e-3)
    assert np.allclose(mean.totals.azimuth, 0.0, atol=1e-12)
    assert mean.mean[0, :, 1] == pytest.approx([0.0, 0.0], abs=1e-9)
    assert np.allclose(mean.cov, run.moments("mean").cov, atol=1e-9)

    with pytest.raises(DomainError):
        run.moments("rotating")


def test_raw_table(holes_run):
    from squeeze_tools import TrajectoryTotals
    from squeeze_tools.dtwa import RAW_COLUMNS

    _, _, run = holes_run
    table = run.table()
    assert tuple(table) == RAW_COLUMNS
    assert len(table["t"]) == 21 * 20
    assert table["trajectory"][:3].tolist() == [0, 1, 2]

    rows = np.stack(list(table.values()), axis=1)
    back = TrajectoryTotals.from_table(rows)
    assert np.array_equal(back.totals, run.totals)
    assert np.array_equal(back.counts, run.counts)
    assert np.array_equal(back.times, run.times)


def test_batches():
    from squeeze_tools.dtwa import batches

    assert batches(10, 4) == [(0, 4), (4, 8), (8, 10)]
    assert batches(4, 4) == [(0, 4)]


@pytest.mark.slow()
def test_oracle_agreement():
    """Hole-free sampled dynamics track the exact chain."""
    from squeeze_tools import (
        EngineConfig,
        SpinCouplings,
        build_lattice,
        oracle_moments,
        run_ensemble,
        squeezing_curve,
    )

    geom = build_lattice(10)
    couplings = SpinCouplings.from_ratios(-0.18)
    cfg = EngineConfig(dt=0.02, n_steps=50, enable_hopping=False, enable_spin_flip=False)
    sampled = run_ensemble(geom, couplings, cfg, None, 20_000, threads=4, frame="lab")
    exact = oracle_moments(geom, couplings, cfg.times)

    # sampling error plus the systematic offset of the truncated Wigner dynamics
    gap = np.abs(sampled.spin_length - exact.spin_length)
    assert np.all(gap <= 3 * sampled.spin_length_err + 0.02)

    k = 32  # t = 0.64
    var_sampled = squeezing_curve(sampled).var_min[k]
    var_exact = squeezing_curve(exact).var_min[k]
    assert abs(var_sampled - var_exact) <= 0.15 * var_exact


@pytest.mark.slow()
def test_cube_squeezing():
    from squeeze_tools import (
        EngineConfig,
        SpinCouplings,
        build_lattice,
        run_ensemble,
        squeezing_curve,
    )

    geom = build_lattice((22, 22, 22))
    cfg = EngineConfig(dt=0.0176, n_steps=200)
    moments = run_ensemble(geom, SpinCouplings.from_ratios(-0.18, -1.1), cfg, None, 500, threads=8)
    curve = squeezing_curve(moments)
    k2 = int(round(2 / cfg.dt))
    k3 = min(int(round(3 / cfg.dt)), cfg.n_steps)
    assert 0.02 <= curve.var_min[k2] <= 0.06
    assert abs(curve.spin_length[k2] - curve.spin_length[k3]) <= 0.03


@pytest.mark.slow()
def test_chain_squeezing_with_holes():
    from squeeze_tools import (
        EngineConfig,
        SpinCouplings,
        build_lattice,
        run_ensemble,
        squeezing_curve,
    )

    geom = build_lattice(32)
    couplings = SpinCouplings.from_ratios(-0.18, -1.1)
    curves = {}
    for rho in (0.0, 0.05):
        cfg = EngineConfig(dt=0.0176, n_steps=100, hole_density=rho, seed=3)
        curves[rho] = squeezing_curve(run_ensemble(geom, couplings, cfg, None, 3000, threads=8))

    holes = curves[0.05]
    assert 1.0 <= holes.db[holes.best] <= 3.0
    assert 0.4 <= holes.times[holes.best] <= 1.0
    assert abs(curves[0.0].db.max() - holes.db.max()) < 0.7


def test_shear_direction_matches_exact():
    from squeeze_tools import (
        EngineConfig,
        SpinCouplings,
        build_lattice,
        oracle_moments,
        run_ensemble,
        squeezing_curve,
    )

    geom = build_lattice(8)
    couplings = SpinCouplings.from_ratios(-0.18)
    cfg = EngineConfig(dt=0.02, n_steps=40, seed=11)
    sampled = squeezing_curve(run_ensemble(geom, couplings, cfg, None, 4000, frame="lab"))
    exact = squeezing_curve(oracle_moments(geom, couplings, cfg.times))

    for k in (20, 30, 40):
        theta, expected = sampled.theta_min[k], exact.theta_min[k]
        assert (theta < pi / 2) == (expected < pi / 2)
        assert abs(theta - expected) <= 0.2


@pytest.mark.slow()
def test_hopping_decay_converges_with_size():
    from squeeze_tools import EngineConfig, SpinCouplings, build_lattice, run_ensemble

    couplings = SpinCouplings.from_ratios(-0.18, -1.1)
    cfg = EngineConfig(
        dt=0.02, n_steps=150, hole_density=0.11, enable_hz_field=False, enable_spin_flip=False
    )
    runs = {}
    for size in (10, 14):
        geom = build_lattice((size,) * 3, periodic=True)
        runs[size] = run_ensemble(geom, couplings, cfg, None, 400, threads=8)

    grid = slice(0, None, 25)
    for moments in runs.values():
        length = moments.spin_length[grid]
        assert (np.diff(length) < 0).all()
        # no plateau: still decaying between t = 2 and t = 3
        k2, k3 = 100, 150
        drop = moments.spin_length[k2] - moments.spin_length[k3]
        assert drop > 3 * np.hypot(moments.spin_length_err[k2], moments.spin_length_err[k3])

    small, large = runs[10], runs[14]
    combined = np.hypot(small.spin_length_err, large.spin_length_err)[grid]
    gap = np.abs(small.spin_length - large.spin_length)[grid]
    assert (gap <= 3 * combined + 1e-9).all()


@pytest.mark.slow()
def test_spin_flip_tunnelling_dominates():
    from squeeze_tools import EngineConfig, SpinCouplings, build_lattice, run_ensemble

    geom = build_lattice((14, 14, 14))
    couplings = SpinCouplings.from_ratios(-0.18, -1.1)
    base = EngineConfig(dt=0.02, n_steps=100, hole_density=0.11, seed=5)

    def length(**toggles):
        cfg = replace(base, **toggles)
        return run_ensemble(geom, couplings, cfg, None, 400, threads=8).spin_length[-1]

    full = length()
    spin_flip = length(enable_hz_field=False)
    hz_field = length(enable_spin_flip=False)
    assert abs(spin_flip - full) <= 0.1
    assert hz_field >= full + 0.15
