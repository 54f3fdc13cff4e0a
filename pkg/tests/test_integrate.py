import dataclasses
import math

import numpy as np
import pytest

from mhnnsync import (
    BlowUpError,
    EnsembleSpec,
    IntegratorConfig,
    MhnnParams,
    ParameterError,
    derive_constants,
    dissipative_envelope,
    integrate,
)
from mhnnsync.analysis import integrate_ensemble
from mhnnsync.model import make_mhnn_rhs

from draws import draw_mhnn


def linear_decay(y):
    return -y


class TestRk4:
    def test_constant_solution(self):
        cfg = IntegratorConfig(dt=0.1, t_end=2.0)
        traj = integrate(lambda y: np.zeros_like(y), np.array([1.5, -2.0]), cfg)
        assert np.all(traj.states == np.array([1.5, -2.0]))
        assert traj.times[0] == 0.0
        assert traj.times[-1] == 2.0

    def test_linear_decay_accuracy(self):
        cfg = IntegratorConfig(dt=0.01, t_end=1.0)
        traj = integrate(linear_decay, np.array([1.0]), cfg)
        assert abs(traj.states[-1, 0] - math.exp(-1.0)) < 1e-9

    def test_empirical_order_four(self):
        errs = []
        for dt in (0.02, 0.01):
            traj = integrate(linear_decay, np.array([1.0]), IntegratorConfig(dt=dt, t_end=1.0))
            errs.append(abs(traj.states[-1, 0] - math.exp(-1.0)))
        order = math.log2(errs[0] / errs[1])
        assert 3.8 <= order <= 4.2

    def test_record_stride_and_final_time(self):
        cfg = IntegratorConfig(dt=0.1, t_end=0.95, record_stride=3)
        traj = integrate(linear_decay, np.array([1.0]), cfg)
        assert traj.times[0] == 0.0
        assert traj.times[-1] == 0.95
        assert np.all(np.diff(traj.times) > 0)

    def test_determinism(self):
        rng = np.random.default_rng(0)
        p = draw_mhnn(rng, 3)
        rhs = make_mhnn_rhs(p)
        y0 = rng.normal(size=4)
        cfg = IntegratorConfig(dt=1e-3, t_end=2.0)
        a = integrate(rhs, y0, cfg)
        b = integrate(rhs, y0, cfg)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.times, b.times)

    def test_blow_up_reports_time(self):
        cfg = IntegratorConfig(dt=0.5, t_end=50.0)
        with pytest.raises(BlowUpError) as exc:
            integrate(lambda y: 5.0 * y, np.array([1.0]), cfg)
        assert 0 < exc.value.t <= 50.0


class TestRk45:
    def test_linear_decay_accuracy(self):
        cfg = IntegratorConfig(method="rk45-adaptive", dt=0.1, t_end=1.0,
                               abs_tol=1e-10, rel_tol=1e-10)
        traj = integrate(linear_decay, np.array([1.0]), cfg)
        assert traj.times[-1] == 1.0
        assert abs(traj.states[-1, 0] - math.exp(-1.0)) < 1e-8

    def test_adapts_to_stiff_transient(self):
        # fast transient then slow drift; the controller must survive both
        def rhs(y):
            return np.array([-50.0 * (y[0] - math.cos(y[1])), 0.1])
        cfg = IntegratorConfig(method="rk45-adaptive", dt=0.5, t_end=5.0,
                               abs_tol=1e-8, rel_tol=1e-8)
        traj = integrate(rhs, np.array([10.0, 0.0]), cfg)
        assert traj.states[-1, 0] == pytest.approx(math.cos(traj.states[-1, 1]), abs=1e-3)


class TestConfigValidation:
    def test_bad_method(self):
        with pytest.raises(ParameterError):
            IntegratorConfig(method="euler").validate()

    def test_dt_must_be_below_t_end(self):
        with pytest.raises(ParameterError):
            IntegratorConfig(dt=2.0, t_end=1.0).validate()

    def test_tolerances_in_unit_interval(self):
        with pytest.raises(ParameterError):
            IntegratorConfig(abs_tol=2.0).validate()


class TestDissipativeEnvelopeHolds:
    def test_trajectory_below_envelope(self):
        # operationalizes the solution bound: recorded norm never exceeds the
        # envelope once dt <= 1e-3/max(a_i, b)
        rng = np.random.default_rng(21)
        p = dataclasses.replace(draw_mhnn(rng, 3), P=0.3)
        dc = derive_constants(p)
        dt = 1e-3 / max(p.a.max(), p.b)
        cfg = IntegratorConfig(dt=dt, t_end=4.0, record_stride=5)
        ens = EnsembleSpec(count=4, radius=6.0, seed=77)
        batch = integrate_ensemble(p, cfg, ens)
        norms = batch.norm_sq_series()
        for j in range(ens.count):
            env = dissipative_envelope(dc, batch.times, norms[0, j])
            assert np.all(norms[:, j] <= env + 1e-6 * (1.0 + env))
