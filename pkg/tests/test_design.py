import math

import numpy as np
import pytest

from haps_isac.linkmetrics import channel_a2g, sinr as sinr_scalar, beampattern_gain
from haps_isac.opt import (
    DesignPoint,
    GenomeLayout,
    build_matched_beamformers,
    evaluate_constraints,
    evaluate_designs,
    fitness,
    objective_scales,
)
from haps_isac.scenario import ScenarioConfig, resolve_scenario


def scenario(**overrides):
    return resolve_scenario(ScenarioConfig(**overrides))


def design_for(sc, xy=(500.0, 500.0), comm=0.5, sense=0.3):
    return DesignPoint(
        uav_xy=np.tile(np.asarray(xy, dtype=float), (sc.M, 1)),
        comm_power=np.full((sc.M, sc.K), comm),
        sense_power=np.full((sc.M, sc.J), sense),
    )


class TestMatchedBeamformers:
    def test_norm_equals_power(self):
        sc = scenario()
        rng = np.random.default_rng(2)
        design = DesignPoint(
            uav_xy=np.array([[410.0, 620.0]]),
            comm_power=rng.uniform(0, 2, (1, sc.K)),
            sense_power=rng.uniform(0, 1, (1, sc.J)),
        )
        bf = build_matched_beamformers(design, sc)[0]
        np.testing.assert_allclose(
            np.sum(np.abs(bf.comm) ** 2, axis=1), design.comm_power[0], rtol=1e-12
        )
        np.testing.assert_allclose(
            np.sum(np.abs(bf.sense) ** 2, axis=1), design.sense_power[0], rtol=1e-12
        )

    def test_zero_power_zero_vector(self):
        sc = scenario(K=1, J=1)
        design = DesignPoint(
            uav_xy=np.array([[500.0, 500.0]]), comm_power=np.zeros((1, 1)), sense_power=np.array([[1.0]])
        )
        bf = build_matched_beamformers(design, sc)[0]
        assert np.all(bf.comm == 0)

    def test_nadir_sense_entries(self):
        sc = scenario(K=1, J=1, target_positions=[[500.0, 500.0]], cu_positions=[[100.0, 100.0]])
        design = DesignPoint(
            uav_xy=np.array([[500.0, 500.0]]), comm_power=np.zeros((1, 1)), sense_power=np.array([[1.0]])
        )
        bf = build_matched_beamformers(design, sc)[0]
        np.testing.assert_allclose(np.abs(bf.sense[0]), 1.0 / 4.0, rtol=1e-12)

    def test_rejects_negative_power(self):
        sc = scenario(K=1, J=1)
        design = DesignPoint(
            uav_xy=np.array([[500.0, 500.0]]), comm_power=np.array([[-1.0]]), sense_power=np.array([[1.0]])
        )
        with pytest.raises(ValueError):
            build_matched_beamformers(design, sc)


class TestConstraints:
    def test_zero_power_violates_only_gain_and_floor(self):
        sc = scenario()
        design = design_for(sc, comm=0.0, sense=0.0)
        violations = dict(evaluate_constraints(design, sc, mode="multi"))
        violated = {name for name, value in violations.items() if value > 0}
        assert violated == {
            name
            for name in violations
            if "beampattern" in name or "sinr_floor" in name
        }
        assert all("beampattern" in name or "sinr_floor" in name for name in violated)
        assert len([n for n in violated if "beampattern" in n]) == sc.J

    def test_budget_boundary_not_violated(self):
        sc = scenario(K=2, J=2, upsilon=1.0, sinr_th=None)
        per = sc.p_max / 4
        design = design_for(sc, comm=per, sense=per)
        violations = dict(evaluate_constraints(design, sc, mode="comm"))
        assert violations["uav0/power_total"] == 0.0

    def test_power_excess_scaled_by_budget(self):
        sc = scenario(K=1, J=0, sinr_th=None)
        design = DesignPoint(
            uav_xy=np.array([[500.0, 500.0]]),
            comm_power=np.array([[2 * sc.p_max]]),
            sense_power=np.zeros((1, 0)),
        )
        violations = dict(evaluate_constraints(design, sc, mode="comm"))
        assert violations["uav0/power_total"] == pytest.approx(1.0, rel=1e-12)

    def test_matched_sense_beam_satisfies_gain(self):
        # Target 100 m away, threshold 1e-5: required gain is 0.1 while a
        # unit-power matched beam achieves 16.
        sc = scenario(
            K=1,
            J=1,
            uav_altitude=60.0,
            cu_positions=[[100.0, 100.0]],
            target_positions=[[580.0, 500.0]],
            gamma_th=1e-5,
        )
        design = DesignPoint(
            uav_xy=np.array([[500.0, 500.0]]), comm_power=np.zeros((1, 1)), sense_power=np.array([[1.0]])
        )
        violations = dict(evaluate_constraints(design, sc, mode="comm"))
        assert violations["uav0/target0/beampattern"] == 0.0

    def test_unknown_mode_rejected(self):
        sc = scenario()
        with pytest.raises(ValueError, match="unknown mode"):
            evaluate_constraints(design_for(sc), sc, mode="hybrid")

    def test_velocity_constraint_reported(self):
        sc = scenario()
        design = design_for(sc, xy=(600.0, 500.0))
        violations = dict(
            evaluate_constraints(design, sc, mode="comm", prev_xy=np.array([[500.0, 500.0]]), velocity_radius=50.0)
        )
        assert violations["uav0/velocity"] == pytest.approx(1.0, rel=1e-12)


class TestFitness:
    def test_endpoint_weights(self):
        sc = scenario()
        design = design_for(sc)
        norms = objective_scales(sc)
        at0 = fitness(design, sc, 0.0, norms, mode="multi")
        at1 = fitness(design, sc, 1.0, norms, mode="multi")
        assert at0.fitness == pytest.approx(
            at0.eta / norms[0] - 1e3 * sum(v**2 for _, v in at0.violations), rel=1e-9
        )
        assert at1.fitness == pytest.approx(
            at1.omega / norms[1] - 1e3 * sum(v**2 for _, v in at1.violations), rel=1e-9
        )

    def test_min_rate_consistent(self):
        sc = scenario()
        obj = fitness(design_for(sc), sc, 0.5)
        assert obj.min_rate == pytest.approx(math.log2(1 + obj.eta), rel=1e-12)

    def test_matches_scalar_metrics(self):
        sc = scenario()
        design = design_for(sc, xy=(430.0, 560.0), comm=0.6, sense=0.2)
        obj = fitness(design, sc, 0.5)
        bf = build_matched_beamformers(design, sc)[0]
        uav = sc.uav_position(design.uav_xy[0])
        channels = [channel_a2g(sc.beta0, uav, cu, sc.uav_geom) for cu in sc.cu_positions[0]]
        scalar_eta = min(sinr_scalar(k, channels, bf, sc.noise_power) for k in range(sc.K))
        assert obj.eta == pytest.approx(scalar_eta, rel=1e-9)

    def test_symmetric_users_prefer_equal_split(self):
        sc = scenario(
            K=2,
            J=0,
            cu_positions=[[400.0, 500.0], [600.0, 500.0]],
            sinr_th=None,
        )
        total = 2.0
        splits = np.linspace(0.05, 0.95, 19)
        values = []
        for split in splits:
            design = DesignPoint(
                uav_xy=np.array([[500.0, 500.0]]),
                comm_power=np.array([[split * total, (1 - split) * total]]),
                sense_power=np.zeros((1, 0)),
            )
            values.append(fitness(design, sc, 0.0, mode="comm").eta)
        assert np.argmax(values) == len(splits) // 2

    def test_beampattern_matches_scalar(self):
        sc = scenario()
        design = design_for(sc, xy=(520.0, 470.0))
        bf = build_matched_beamformers(design, sc)[0]
        uav = sc.uav_position(design.uav_xy[0])
        required = []
        for j, target in enumerate(sc.target_positions[0]):
            gain = beampattern_gain(uav, target, sc.uav_geom, bf)
            d2 = (uav.x - target.x) ** 2 + (uav.y - target.y) ** 2 + uav.z**2
            required.append(gain >= d2 * sc.gamma_th)
        violations = dict(evaluate_constraints(design, sc, mode="comm"))
        for j, ok in enumerate(required):
            assert (violations[f"uav0/target{j}/beampattern"] == 0.0) == ok


class TestDecode:
    def test_budget_repair_total(self):
        sc = scenario(K=2, J=2, upsilon=1.0)
        layout = GenomeLayout.build(sc, "comm")
        genome = np.concatenate([[500.0, 500.0], np.full(4, sc.p_max)])
        _, comm, sense = layout.decode(genome[None, :])
        total = comm.sum() + sense.sum()
        assert total == pytest.approx(sc.p_max, rel=1e-12)

    def test_budget_repair_sense_cap(self):
        sc = scenario(K=2, J=2, upsilon=0.3)
        layout = GenomeLayout.build(sc, "multi")
        genome = np.concatenate([[500.0, 500.0], [0.1, 0.1], np.full(2, sc.p_max)])
        _, comm, sense = layout.decode(genome[None, :])
        assert sense.sum() <= 0.3 * sc.p_max + 1e-12
        assert comm.sum() + sense.sum() <= sc.p_max + 1e-12

    def test_sensing_mode_drops_comm_genes(self):
        sc = scenario(K=3, J=2)
        layout = GenomeLayout.build(sc, "sensing")
        assert layout.genes_per_uav == 2 + sc.J
        _, comm, sense = layout.decode(np.concatenate([[500.0, 500.0], [1.0, 1.0]])[None, :])
        assert comm.shape == (1, 1, 3)
        assert np.all(comm == 0)

    def test_velocity_projection(self):
        sc = scenario()
        prev = np.array([[500.0, 500.0]])
        layout = GenomeLayout.build(sc, "comm", prev_xy=prev, velocity_radius=10.0)
        genome = np.concatenate([[600.0, 500.0], np.full(sc.K + sc.J, 0.1)])
        xy, _, _ = layout.decode(genome[None, :])
        assert np.linalg.norm(xy[0, 0] - prev[0]) <= 10.0 + 1e-9

    def test_encode_decode_roundtrip(self):
        sc = scenario()
        layout = GenomeLayout.build(sc, "multi")
        design = design_for(sc, xy=(340.0, 720.0), comm=0.4, sense=0.2)
        xy, comm, sense = layout.decode(layout.encode(design)[None, :])
        np.testing.assert_allclose(xy[0], design.uav_xy, rtol=1e-12)
        np.testing.assert_allclose(comm[0], design.comm_power, rtol=1e-12)
        np.testing.assert_allclose(sense[0], design.sense_power, rtol=1e-12)


class TestBatchEvaluator:
    def test_shared_position_fast_path_matches(self):
        sc = scenario()
        rng = np.random.default_rng(31)
        q = np.array([[[420.0, 580.0]]])
        comm = rng.uniform(0, 1, (40, 1, sc.K))
        sense = rng.uniform(0, 0.5, (40, 1, sc.J))
        shared = evaluate_designs(sc, q, comm, sense, mode="multi", mu=0.4)
        per_row = evaluate_designs(sc, np.repeat(q, 40, axis=0), comm, sense, mode="multi", mu=0.4)
        np.testing.assert_allclose(shared.eta, per_row.eta, rtol=1e-12)
        np.testing.assert_allclose(shared.omega, per_row.omega, rtol=1e-12)
        np.testing.assert_allclose(shared.fitness, per_row.fitness, rtol=1e-12)
        np.testing.assert_allclose(shared.violations, per_row.violations, rtol=1e-12)

    def test_power_interference_leq_coherent_possible(self):
        # The two interference conventions agree when there is a single
        # beam and differ in general.
        sc = scenario(K=1, J=0, sinr_th=None)
        design = design_for(sc, comm=1.0, sense=0.0)
        coherent = fitness(design, sc, 0.0, mode="comm").eta
        power = fitness(design, sc, 0.0, mode="comm", interference="power").eta
        assert coherent == pytest.approx(power, rel=1e-12)

    def test_multi_uav_eta_is_global_min(self):
        sc = scenario(
            M=2,
            K=1,
            J=1,
            cu_positions=[[[200.0, 200.0]], [[800.0, 800.0]]],
            target_positions=[[[250.0, 250.0]], [[750.0, 750.0]]],
        )
        design = DesignPoint(
            uav_xy=np.array([[220.0, 220.0], [780.0, 780.0]]),
            comm_power=np.array([[1.0], [0.25]]),
            sense_power=np.array([[0.1], [0.1]]),
        )
        obj = fitness(design, sc, 0.0, mode="comm")
        per_uav = []
        for m in range(2):
            bf = build_matched_beamformers(design, sc)[m]
            uav = sc.uav_position(design.uav_xy[m])
            channels = [channel_a2g(sc.beta0, uav, cu, sc.uav_geom) for cu in sc.cu_positions[m]]
            per_uav.append(sinr_scalar(0, channels, bf, sc.noise_power))
        assert obj.eta == pytest.approx(min(per_uav), rel=1e-9)
