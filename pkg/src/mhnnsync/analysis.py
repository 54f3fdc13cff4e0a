"""Trajectory analysis: gap measurement, guarantee verification, ensembles, sweeps.

The synchronization degree (a sup/limsup over initial states and time) is
replaced by a finite surrogate: the maximum recorded pairwise gap over the
final tail fraction of the horizon, maximized over a seeded ensemble of
initial states. No completeness claim is made for the sup; ensemble size and
sampling radius are reported alongside the estimate.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import constants as cst
from .integrate import BlowUpError, IntegratorConfig, Trajectory, integrate
from .model import HebbianParams, MhnnParams, ParameterError, make_hebbian_rhs, make_mhnn_rhs

Params = Union[MhnnParams, HebbianParams]


class UndefinedFitError(RuntimeError):
    """Too few usable points to fit a decay rate."""


@dataclass
class EnsembleSpec:
    """Seeded ensemble of initial states sampled uniformly in a ball of given radius."""

    count: int = 10
    radius: float = 5.0
    seed: int = 0
    tail_fraction: float = 0.2

    def validate(self) -> None:
        if not (self.count >= 1):
            raise ParameterError("ensemble.count", "ensemble count must be >= 1")
        if not (self.radius > 0):
            raise ParameterError("ensemble.radius", "sampling radius must be positive")
        if not (0 < self.tail_fraction < 1):
            raise ParameterError("ensemble.tail_fraction", "tail_fraction must lie in (0, 1)")


@dataclass
class EnvelopeViolation:
    trajectory: int
    time: float
    measured: float
    bound: float
    check: str       # "dissipative" | "gap" | "weight"


@dataclass
class SyncReport:
    deg_estimate: float
    epsilon: float
    p_used: float
    p_star: float
    entry_times: list
    violations: list
    fitted_rate: Optional[float]
    rate_theory: float
    verdict: str     # "pass" | "fail"

    def to_dict(self) -> dict:
        return {
            "deg_estimate": self.deg_estimate,
            "epsilon": self.epsilon,
            "p_used": self.p_used,
            "p_star": self.p_star,
            "entry_times": self.entry_times,
            "violations": [dataclasses.asdict(v) for v in self.violations],
            "fitted_rate": self.fitted_rate,
            "rate_theory": self.rate_theory,
            "verdict": self.verdict,
        }


def sample_initial_states(ens: EnsembleSpec, dim: int) -> np.ndarray:
    """(count, dim) points uniform in the ball of radius ens.radius.

    Uses the Philox counter-based generator so the sequence is fully specified
    by the seed and portable across platforms.
    """
    ens.validate()
    rng = np.random.Generator(np.random.Philox(ens.seed))
    direction = rng.standard_normal((ens.count, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radii = ens.radius * rng.random(ens.count) ** (1.0 / dim)
    return direction * radii[:, None]


def pairwise_gap_series(traj: Trajectory) -> np.ndarray:
    """max_{i<j} |u_i(t) - u_j(t)| at each recorded time."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    u = traj.states[..., :traj.m] if traj.m else traj.states
    return u.max(axis=-1) - u.min(axis=-1)


def estimate_sync_degree(trajs: Sequence[Trajectory], tail_fraction: float = 0.2) -> float:
    """Finite-horizon limsup surrogate: max tail gap over the ensemble."""
    if not trajs:
        raise ValueError("empty ensemble")
    deg = 0.0
    for traj in trajs:
        gaps = pairwise_gap_series(traj)
        tail = traj.times >= (1.0 - tail_fraction) * traj.times[-1]
        deg = max(deg, float(gaps[tail].max()))
    return deg


def fit_decay_rate(times: np.ndarray, gaps: np.ndarray, floor: float = 0.0) -> float:
    """Least-squares decay rate of ln(gap) on the pre-plateau segment.

    Uses points from the start of the series until the gap first drops below
    max(2*floor, 1e-9), and fits ln(gap - floor) so a residual plateau does not
    bias the slope. Returns the decay rate (positive = decaying).
    """
    times = np.asarray(times, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    cutoff = max(2.0 * floor, 1e-9)
    below = np.nonzero(gaps < cutoff)[0]
    end = below[0] if below.size else len(gaps)
    t, g = times[:end], gaps[:end] - floor
    usable = g > 0
    if usable.sum() < 5:
        raise UndefinedFitError(f"only {int(usable.sum())} usable points before the gap "
                                f"reached {cutoff:g}; need at least 5")
    slope = np.polyfit(t[usable], np.log(g[usable]), 1)[0]
    return float(-slope)


def _make_rhs(p: Params):
    if isinstance(p, HebbianParams):
        return make_hebbian_rhs(p)
    return make_mhnn_rhs(p)


def integrate_ensemble(p: Params, cfg: IntegratorConfig, ens: EnsembleSpec) -> Trajectory:
    """Batched trajectory for a seeded ensemble of initial states.

    For the Hebbian model the (u, rho) block is sampled in the ball and every
    member starts from the same initial weight matrix p.w0.
    """
    p.validate()
    ens.validate()
    hebbian = isinstance(p, HebbianParams)
    ball = sample_initial_states(ens, p.m + 1)
    if hebbian:
        w0 = np.broadcast_to(p.w0.reshape(1, -1), (ens.count, p.m * p.m))
        y0 = np.concatenate([ball, w0], axis=1)
    else:
        y0 = ball
    return integrate(_make_rhs(p), y0, cfg, params_digest=p.digest(),
                     m=p.m, has_weights=hebbian)


def default_horizon(p: Params, ens: EnsembleSpec) -> float:
    """max(5*T_B(radius^2), 20/rate(P)): transient decayed by at least e^-20."""
    dc = cst.derive_constants(p)
    t_absorb = cst.absorb_time(dc, ens.radius**2) if ens.radius > 0 else 0.0
    rate = cst.sync_rate(p, dc, p.P)
    return max(5.0 * t_absorb, 20.0 / rate, 1.0)


def _tolerance(bound) -> np.ndarray:
    return 1e-6 * (1.0 + np.asarray(bound))


def verify_guarantees(p: Params, cfg: IntegratorConfig, ens: EnsembleSpec,
                      epsilon: float) -> SyncReport:
    """Integrate a seeded ensemble and check every provable bound on it.

    Checks per trajectory: the dissipative envelope at every recorded time,
    the gap envelope from one sample past ball entry, and (Hebbian only) the
    weight ultimate bound. Envelope violations are reported, not raised.
    """
    dc = cst.derive_constants(p)
    thr = cst.threshold(p, epsilon)
    rate_theory = cst.sync_rate(p, dc, p.P)
    residual = cst.gap_residual(p, dc, p.P)
    hebbian = isinstance(p, HebbianParams)

    batch = integrate_ensemble(p, cfg, ens)
    times = batch.times
    norm_sq = batch.norm_sq_series()           # (n, count)
    gaps = pairwise_gap_series(batch)          # (n, count)

    entry_times: list = []
    violations: list = []
    fitted: list = []
    if hebbian:
        weight_bound = p.w0**2 + cst._hebbian_weight_margin(p)

    for j in range(ens.count):
        ns = norm_sq[:, j]
        # (i) dissipative envelope from the initial squared norm
        env = cst.dissipative_envelope(dc, times, ns[0])
        bad = np.nonzero(ns > env + _tolerance(env))[0]
        for i in bad:
            violations.append(EnvelopeViolation(j, float(times[i]), float(ns[i]),
                                                float(env[i]), "dissipative"))
        # (ii) gap envelope from the first recorded sample inside the ball
        inside = np.nonzero(ns < dc.bound)[0]
        if inside.size:
            e = int(inside[0])
            entry_times.append(float(times[e]))
            genv = cst.gap_envelope(p, dc, p.P, times[e:] - times[e], gaps[e, j]**2)
            bad = np.nonzero(gaps[e + 1:, j]**2 > genv[1:] + _tolerance(genv[1:]))[0]
            for i in bad:
                violations.append(EnvelopeViolation(j, float(times[e + 1 + i]),
                                                    float(gaps[e + 1 + i, j]**2),
                                                    float(genv[1 + i]), "gap"))
            try:
                fitted.append(fit_decay_rate(times[e:], gaps[e:, j], floor=residual))
            except UndefinedFitError:
                pass
        else:
            entry_times.append(None)
        # (iii) Hebbian weight ultimate bound, elementwise
        if hebbian:
            w_sq = batch.states[:, j, p.m + 1:].reshape(-1, p.m, p.m)**2
            excess = w_sq - (weight_bound + _tolerance(weight_bound))
            bad_t, bi, bj = np.nonzero(excess > 0)
            for i, wi, wj in zip(bad_t, bi, bj):
                violations.append(EnvelopeViolation(j, float(times[i]), float(w_sq[i, wi, wj]),
                                                    float(weight_bound[wi, wj]), "weight"))

    members = [batch.member(j) for j in range(ens.count)]
    deg = estimate_sync_degree(members, ens.tail_fraction)
    fitted_rate = float(np.median(fitted)) if fitted else None
    verdict = "pass" if (deg < epsilon and not violations) else "fail"
    return SyncReport(deg_estimate=deg, epsilon=epsilon, p_used=p.P, p_star=thr.p_star,
                      entry_times=entry_times, violations=violations,
                      fitted_rate=fitted_rate, rate_theory=rate_theory, verdict=verdict)


@dataclass
class SweepRow:
    P: float
    deg_estimate: Optional[float]
    p_star: float
    rate_theory: float
    rate_fitted: Optional[float]
    verdict: str     # "pass" | "fail" | "error"


def sweep_coupling(p: Params, cfg: IntegratorConfig, ens: EnsembleSpec,
                   p_values: Sequence[float], epsilon: float) -> list:
    """verify_guarantees per coupling value with a shared seed, rows ordered by P."""
    if len(p_values) == 0:
        raise ParameterError("p_values", "sweep requires at least one coupling value")
    rows = []
    for P in sorted(p_values):
        pP = dataclasses.replace(p, P=float(P))
        try:
            rep = verify_guarantees(pP, cfg, ens, epsilon)
        except BlowUpError:
            dc = cst.derive_constants(pP)
            rows.append(SweepRow(P=float(P), deg_estimate=None,
                                 p_star=cst.threshold(pP, epsilon).p_star,
                                 rate_theory=cst.sync_rate(pP, dc, float(P)),
                                 rate_fitted=None, verdict="error"))
            continue
        rows.append(SweepRow(P=float(P), deg_estimate=rep.deg_estimate, p_star=rep.p_star,
                             rate_theory=rep.rate_theory, rate_fitted=rep.fitted_rate,
                             verdict=rep.verdict))
    return rows
