import dataclasses

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mhnnsync import (
    ActivationSpec,
    HebbianParams,
    MhnnParams,
    NetworkState,
    ParameterError,
    hebbian_rhs,
    mhnn_rhs,
    sigmoid_gamma,
    window_eval,
)
from mhnnsync.model import activation_eval

from draws import draw_mhnn


def mk_mhnn(**kw):
    base = dict(m=2, a=[2.0, 2.0], b=1.0, k=1.0, eta=[1.0, 1.0],
                w=np.zeros((2, 2)), J=[0.0, 0.0], gamma=[1.0, 1.0])
    base.update(kw)
    return MhnnParams(**base)


def mk_hebbian(**kw):
    base = dict(m=2, a=[2.0, 2.0], b=1.0, k=[1.0, 1.0], eta=[1.0, 1.0],
                J=[0.0, 0.0], gamma=[1.0, 1.0], c=np.ones((2, 2)),
                lam=np.ones((2, 2)), w0=np.ones((2, 2)))
    base.update(kw)
    return HebbianParams(**base)


class TestSigmoidGamma:
    def test_half_at_switch_point(self):
        for r, V in [(1.0, 0.0), (5.0, -2.0), (0.3, 7.5)]:
            assert sigmoid_gamma(V, r, V) == 0.5

    def test_saturation(self):
        assert sigmoid_gamma(1000.0, 1.0, 0.0) == pytest.approx(1.0, abs=1e-12)
        assert sigmoid_gamma(-1000.0, 1.0, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_hand_value_ln3(self):
        # 1/(1 + e^{-ln 3}) = 3/4
        assert sigmoid_gamma(np.log(3.0), 1.0, 0.0) == pytest.approx(0.75, rel=1e-14)

    def test_overflow_safe(self):
        with np.errstate(over="raise"):
            assert sigmoid_gamma(1e8, 50.0, 0.0) == 1.0
            assert sigmoid_gamma(-1e8, 50.0, 0.0) == 0.0

    def test_range_and_monotone_large_sample(self):
        # [0,1] range on 10^6 random triples (exact 0/1 only from saturation);
        # strictly interior for moderate arguments; monotone in s
        rng = np.random.default_rng(42)
        s = rng.uniform(-1e3, 1e3, 10**6)
        r = rng.uniform(1e-3, 10.0, 10**6)
        V = rng.uniform(-1e2, 1e2, 10**6)
        vals = sigmoid_gamma(s, r, V)
        assert np.all(vals >= 0) and np.all(vals <= 1)
        moderate = np.abs(r * (s - V)) < 30
        assert np.all(vals[moderate] > 0) and np.all(vals[moderate] < 1)
        s_sorted = np.sort(rng.uniform(-20, 20, 10**4))
        mono = sigmoid_gamma(s_sorted, 0.7, 1.3)
        assert np.all(np.diff(mono) > 0)

    def test_rejects_nonpositive_slope(self):
        with pytest.raises(ParameterError):
            sigmoid_gamma(0.0, 0.0, 0.0)


class TestWindow:
    def test_quadratic_at_zero(self):
        assert window_eval("quadratic", 0.0, 3.7) == 1.0

    def test_strukov_williams_root(self):
        assert window_eval("strukov-williams", 2.0, 2.0) == 0.0

    def test_quadratic_hand_value(self):
        assert window_eval("quadratic", 2.0, 0.5) == -1.0

    @given(st.floats(-50, 50), st.floats(0.01, 10))
    def test_strukov_williams_identity(self, rho, eta):
        assert window_eval("strukov-williams", rho, eta) == pytest.approx(
            rho * eta - rho * rho, rel=1e-12, abs=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            window_eval("jogelkar", 0.5, 1.0)


class TestActivations:
    @pytest.mark.parametrize("kind", ["tanh-scaled", "logistic-centered", "sine-clamped"])
    def test_bounded_everywhere(self, kind):
        rng = np.random.default_rng(3)
        s = rng.uniform(-1e6, 1e6, 10**5)
        beta = 1.7
        vals = activation_eval(kind, beta, s)
        assert np.all(np.abs(vals) <= beta + 1e-12)

    def test_logistic_centering(self):
        # beta*(2/(1+e^-s) - 1) evaluated against the raw expression
        s = np.linspace(-20, 20, 401)
        raw = 0.9 * (2.0 / (1.0 + np.exp(-s)) - 1.0)
        assert activation_eval("logistic-centered", 0.9, s) == pytest.approx(raw, abs=1e-14)

    def test_odd_at_origin(self):
        for kind in ("tanh-scaled", "logistic-centered", "sine-clamped"):
            assert activation_eval(kind, 2.0, 0.0) == 0.0

    def test_activation_spec_validation(self):
        with pytest.raises(ParameterError):
            ActivationSpec("relu", 1.0).validate()
        with pytest.raises(ParameterError):
            ActivationSpec("tanh-scaled", 0.0).validate()


class TestMhnnRhs:
    def test_origin_reduces_to_input_currents(self):
        p = mk_mhnn(J=[0.3, -0.8], w=np.full((2, 2), 0.5), P=2.0)
        d = mhnn_rhs(p, NetworkState(u=[0.0, 0.0], rho=0.0))
        assert d.u == pytest.approx([0.3, -0.8])
        assert d.rho == 0.0

    def test_hand_substitution(self):
        # du_1 = -2*1 + 1*(1-0)*1 = -1, du_2 = -2*(-1) + 1*(-1) = 1
        p = mk_mhnn()
        d = mhnn_rhs(p, NetworkState(u=[1.0, -1.0], rho=0.0))
        assert d.u == pytest.approx([-1.0, 1.0])
        assert d.rho == pytest.approx(0.0)

    def test_linear_coupling_zero_mode(self):
        p = mk_mhnn(m=3, a=[2, 2, 2], eta=[1, 1, 1], w=np.zeros((3, 3)),
                    J=[0, 0, 0], gamma=[1, 1, 1], P=4.0, coupling_kind="linear")
        u = np.full(3, 0.37)
        base = mhnn_rhs(dataclasses.replace(p, P=0.0), NetworkState(u=u, rho=0.1))
        coupled = mhnn_rhs(p, NetworkState(u=u, rho=0.1))
        assert coupled.u == pytest.approx(base.u, abs=0.0)

    def test_dimension_mismatch(self):
        p = mk_mhnn()
        with pytest.raises(ParameterError):
            mhnn_rhs(p, NetworkState(u=[1.0, 2.0, 3.0], rho=0.0))
        with pytest.raises(ParameterError):
            mhnn_rhs(p, NetworkState(u=[1.0, 2.0], rho=0.0, weights=np.zeros((2, 2))))

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(9)
        p = draw_mhnn(rng, 5)
        u = rng.normal(size=5)
        rho = 0.4
        perm = rng.permutation(5)
        d = mhnn_rhs(p, NetworkState(u=u, rho=rho))
        p_perm = MhnnParams(
            m=5, a=p.a[perm], b=p.b, k=p.k, eta=p.eta[perm],
            w=p.w[np.ix_(perm, perm)], J=p.J[perm], gamma=p.gamma[perm],
            P=p.P, r=p.r, V=p.V,
            activations=tuple(p.activations[i] for i in perm),
            coupling_kind=p.coupling_kind)
        out = mhnn_rhs(p_perm, NetworkState(u=u[perm], rho=rho))
        assert out.u == pytest.approx(d.u[perm], rel=1e-12)
        assert out.rho == pytest.approx(d.rho, rel=1e-12)


class TestHebbianRhs:
    def test_origin(self):
        p = mk_hebbian(J=[0.4, -0.1])
        s = NetworkState(u=[0.0, 0.0], rho=0.0, weights=np.zeros((2, 2)))
        d = hebbian_rhs(p, s)
        assert d.u == pytest.approx([0.4, -0.1])
        assert d.rho == 0.0
        assert d.weights == pytest.approx(np.zeros((2, 2)))

    def test_memristive_term_vanishes_at_eta(self):
        p = mk_hebbian(eta=[0.8, 0.8], lam=np.zeros((2, 2)), c=np.ones((2, 2)))
        u = np.array([1.3, -0.5])
        s = NetworkState(u=u, rho=0.8, weights=np.zeros((2, 2)))
        d = hebbian_rhs(p, s)
        # rho*(eta - rho) = 0, so du reduces to -a u + J
        assert d.u == pytest.approx(-p.a * u + p.J)

    def test_pure_weight_decay(self):
        p = mk_hebbian(lam=np.zeros((2, 2)))
        s = NetworkState(u=[0.0, 0.0], rho=0.0, weights=np.ones((2, 2)))
        d = hebbian_rhs(p, s)
        assert d.weights == pytest.approx(-np.ones((2, 2)))

    def test_missing_weights(self):
        with pytest.raises(ParameterError):
            hebbian_rhs(mk_hebbian(), NetworkState(u=[0.0, 0.0], rho=0.0))


class TestValidation:
    def test_assumption_boundary(self):
        with pytest.raises(ParameterError, match="a_i > k"):
            mk_mhnn(k=2.0).validate()

    def test_m_too_small(self):
        p = MhnnParams(m=1, a=[2.0], b=1.0, k=1.0, eta=[1.0], w=[[0.0]],
                       J=[0.0], gamma=[0.0])
        with pytest.raises(ParameterError):
            p.validate()

    def test_dimension_mismatch_raises(self):
        with pytest.raises(ParameterError):
            MhnnParams(m=3, a=[1.0, 2.0], b=1.0, k=0.5, eta=[1, 1, 1],
                       w=np.zeros((3, 3)), J=[0, 0, 0], gamma=[0, 0, 0])

    def test_hebbian_assumption(self):
        with pytest.raises(ParameterError, match="eta"):
            mk_hebbian(a=[0.4, 0.4]).validate()

    def test_hebbian_w0_binary(self):
        with pytest.raises(ParameterError):
            mk_hebbian(w0=np.full((2, 2), 0.5)).validate()

    def test_norm_excludes_weights(self):
        s = NetworkState(u=[3.0, 4.0], rho=0.0, weights=np.full((2, 2), 100.0))
        assert s.norm_sq() == 25.0

    def test_state_vector_round_trip(self):
        s = NetworkState(u=[1.0, 2.0], rho=-0.5, weights=np.arange(4.0).reshape(2, 2))
        back = NetworkState.from_vector(s.to_vector(), 2, has_weights=True)
        assert back.u == pytest.approx(s.u)
        assert back.rho == s.rho
        assert back.weights == pytest.approx(s.weights)
