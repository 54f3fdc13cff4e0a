"""Network models: parameter/state types, activations, memristor windows, ODE right-hand sides.

Two coupled systems are implemented:

* the memristive Hopfield network (mHNN): m membrane potentials u_i plus a
  shared memductance state rho, with static synaptic weights and either a
  weak sigmoidal or a linear (diffusive) interneuron coupling;
* its Hebbian extension, where the synaptic weight matrix w(t) evolves by
  dw_ij/dt = -c_ij w_ij + lambda_ij f_i(u_i) f_j(u_j) and the memristor uses
  the Strukov-Williams window rho*(eta - rho).

All functions here are pure; parameter objects are treated as immutable after
``validate()``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

ACTIVATION_KINDS = ("tanh-scaled", "logistic-centered", "sine-clamped")
WINDOW_KINDS = ("quadratic", "strukov-williams")
COUPLING_KINDS = ("weak-sigmoidal", "linear")

_ACT_CODE = {kind: i for i, kind in enumerate(ACTIVATION_KINDS)}


class ParameterError(ValueError):
    """A parameter set violates a model invariant.

    ``field`` carries the offending field path for CLI error reporting.
    """

    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field = field_path


@dataclass(frozen=True)
class ActivationSpec:
    """A bounded activation: |f(s)| <= beta for all real s."""

    kind: str
    beta: float = 1.0

    def validate(self, path: str = "activation") -> None:
        if self.kind not in ACTIVATION_KINDS:
            raise ParameterError(f"{path}.kind",
                                 f"unknown kind {self.kind!r}, expected one of {ACTIVATION_KINDS}")
        if not (self.beta > 0):
            raise ParameterError(f"{path}.beta", "bound beta must be positive")

    def __call__(self, s):
        return activation_eval(self.kind, self.beta, s)


def activation_eval(kind: str, beta: float, s):
    """Evaluate one activation family at s (scalar or array)."""
    s = np.asarray(s, dtype=float)
    if kind == "tanh-scaled":
        return beta * np.tanh(s)
    if kind == "logistic-centered":
        # 2/(1+e^-s) - 1 == tanh(s/2), which is the overflow-safe form
        return beta * np.tanh(0.5 * s)
    if kind == "sine-clamped":
        return beta * np.sin(s)
    raise ParameterError("activation.kind", f"unknown kind {kind!r}")


def _activation_table(activations) -> tuple[np.ndarray, np.ndarray]:
    codes = np.array([_ACT_CODE[a.kind] for a in activations], dtype=np.int64)
    betas = np.array([a.beta for a in activations], dtype=float)
    return codes, betas


def _activation_values(codes: np.ndarray, betas: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Per-node activation f_j(u_j); u has shape (..., m)."""
    out = np.where(codes == 0, np.tanh(u),
                   np.where(codes == 1, np.tanh(0.5 * u), np.sin(u)))
    return betas * out


def sigmoid_gamma(s, r: float, V: float):
    """Interneuron sigmoid 1/(1 + exp(-r(s - V))), overflow-safe, values in (0, 1)."""
    if not np.all(np.asarray(r) > 0):
        raise ParameterError("r", "sigmoid slope r must be positive")
    z = r * (np.asarray(s, dtype=float) - V)
    e = np.exp(-np.abs(z))
    out = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out if out.ndim else float(out)


def window_eval(kind: str, rho, eta: float):
    """Memristor window: 'quadratic' 1 - eta*rho^2 or 'strukov-williams' rho*(eta - rho)."""
    if not (eta > 0):
        raise ParameterError("eta", "window curvature eta must be positive")
    rho = np.asarray(rho, dtype=float)
    if kind == "quadratic":
        out = 1.0 - eta * rho**2
    elif kind == "strukov-williams":
        out = rho * (eta - rho)
    else:
        raise ParameterError("window.kind",
                             f"unknown kind {kind!r}, expected one of {WINDOW_KINDS}")
    return out if out.ndim else float(out)


def _as_vector(x, m: int, path: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.ndim(x) == 0:
        arr = np.full(m, float(x))
    if arr.shape != (m,):
        raise ParameterError(path, f"expected length-{m} vector, got shape {arr.shape}")
    return arr


def _as_matrix(x, m: int, path: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.ndim(x) == 0:
        arr = np.full((m, m), float(x))
    if arr.shape != (m, m):
        raise ParameterError(path, f"expected {m}x{m} matrix, got shape {arr.shape}")
    return arr


@dataclass
class MhnnParams:
    """Full parameter set of the memristive Hopfield network."""

    m: int
    a: np.ndarray                # per-node self-decay, a_i > k
    b: float                     # memristor decay
    k: float                     # memristive coupling strength
    eta: np.ndarray              # per-node window curvature
    w: np.ndarray                # static synaptic weights, m x m
    J: np.ndarray                # input currents
    gamma: np.ndarray            # memristor drive coefficients
    P: float = 0.0               # network coupling strength
    r: float = 1.0               # sigmoid slope
    V: float = 0.0               # bursting switch
    activations: tuple = ()      # one ActivationSpec per node
    coupling_kind: str = "weak-sigmoidal"

    def __post_init__(self):
        self.m = int(self.m)
        self.a = _as_vector(self.a, self.m, "a")
        self.eta = _as_vector(self.eta, self.m, "eta")
        self.J = _as_vector(self.J, self.m, "J")
        self.gamma = _as_vector(self.gamma, self.m, "gamma")
        self.w = _as_matrix(self.w, self.m, "w")
        if not self.activations:
            self.activations = tuple(ActivationSpec("tanh-scaled", 1.0) for _ in range(self.m))
        self.activations = tuple(self.activations)

    @property
    def dim(self) -> int:
        return self.m + 1

    @property
    def beta_max(self) -> float:
        return max(a.beta for a in self.activations)

    def validate(self) -> None:
        if self.m < 2:
            raise ParameterError("m", "node count must satisfy m >= 2")
        if len(self.activations) != self.m:
            raise ParameterError("activations",
                                 f"expected {self.m} activation specs, got {len(self.activations)}")
        for i, act in enumerate(self.activations):
            act.validate(f"activations[{i}]")
        if not (self.k > 0):
            raise ParameterError("k", "memristive coupling strength k must be positive")
        if not np.all(self.a > self.k):
            raise ParameterError(
                "a", f"assumption 'a_i > k' violated: min a_i = {self.a.min()} <= k = {self.k}")
        if not (self.b > 0):
            raise ParameterError("b", "memristor decay b must be positive")
        if not np.all(self.eta > 0):
            raise ParameterError("eta", "all window curvatures eta_i must be positive")
        if not (self.r > 0):
            raise ParameterError("r", "sigmoid slope r must be positive")
        if not (self.P >= 0):
            raise ParameterError("P", "coupling strength P must be nonnegative")
        if self.coupling_kind not in COUPLING_KINDS:
            raise ParameterError("coupling_kind",
                                 f"unknown coupling {self.coupling_kind!r}, expected one of {COUPLING_KINDS}")

    def digest(self) -> str:
        h = hashlib.sha256()
        for part in (self.m, self.a, self.b, self.k, self.eta, self.w, self.J,
                     self.gamma, self.P, self.r, self.V, self.coupling_kind,
                     [(s.kind, s.beta) for s in self.activations]):
            h.update(repr(np.asarray(part).tolist() if isinstance(part, np.ndarray) else part).encode())
        return h.hexdigest()[:16]


@dataclass
class HebbianParams:
    """Parameter set of the Hebbian-learning extension (Strukov-Williams window)."""

    m: int
    a: np.ndarray
    b: float
    k: np.ndarray                # per-node memristive strength k_i
    eta: np.ndarray
    J: np.ndarray
    gamma: np.ndarray
    c: np.ndarray                # weight decay matrix, all c_ij > 0
    lam: np.ndarray              # Hebbian coefficient matrix
    w0: np.ndarray               # initial connectivity, entries in {0, 1}
    P: float = 0.0
    r: float = 1.0
    V: float = 0.0
    activations: tuple = ()
    coupling_kind: str = "linear"

    def __post_init__(self):
        self.m = int(self.m)
        self.a = _as_vector(self.a, self.m, "a")
        self.k = _as_vector(self.k, self.m, "k")
        self.eta = _as_vector(self.eta, self.m, "eta")
        self.J = _as_vector(self.J, self.m, "J")
        self.gamma = _as_vector(self.gamma, self.m, "gamma")
        self.c = _as_matrix(self.c, self.m, "c")
        self.lam = _as_matrix(self.lam, self.m, "lambda")
        self.w0 = _as_matrix(self.w0, self.m, "w0")
        if not self.activations:
            self.activations = tuple(ActivationSpec("tanh-scaled", 1.0) for _ in range(self.m))
        self.activations = tuple(self.activations)

    @property
    def dim(self) -> int:
        return self.m + 1 + self.m * self.m

    @property
    def k_max(self) -> float:
        return float(self.k.max())

    @property
    def eta_min(self) -> float:
        return float(self.eta.min())

    @property
    def beta_max(self) -> float:
        return max(a.beta for a in self.activations)

    def validate(self) -> None:
        if self.m < 2:
            raise ParameterError("m", "node count must satisfy m >= 2")
        if len(self.activations) != self.m:
            raise ParameterError("activations",
                                 f"expected {self.m} activation specs, got {len(self.activations)}")
        for i, act in enumerate(self.activations):
            act.validate(f"activations[{i}]")
        if not np.all(self.k > 0):
            raise ParameterError("k", "all memristive strengths k_i must be positive")
        if not (self.b > 0):
            raise ParameterError("b", "memristor decay b must be positive")
        if not np.all(self.eta > 0):
            raise ParameterError("eta", "all window curvatures eta_i must be positive")
        # strictly stronger than a > k*eta^2/2 alone so that both the
        # dissipation denominator (eta^2) and the sync rate (eta) stay positive
        bar = 0.5 * self.k_max * max(self.eta_min, self.eta_min**2)
        if not (self.a.min() > bar):
            raise ParameterError(
                "a",
                "assumption 'a > (1/2) k eta^2' violated: "
                f"min a_i = {self.a.min()} <= (1/2) k_max max(eta_min, eta_min^2) = {bar}")
        if not np.all(self.c > 0):
            raise ParameterError("c", "all weight decays c_ij must be positive")
        if not np.all((self.w0 == 0) | (self.w0 == 1)):
            raise ParameterError("w0", "initial weights must have entries in {0, 1}")
        if not (self.r > 0):
            raise ParameterError("r", "sigmoid slope r must be positive")
        if not (self.P >= 0):
            raise ParameterError("P", "coupling strength P must be nonnegative")
        if self.coupling_kind != "linear":
            raise ParameterError("coupling_kind", "hebbian model uses linear coupling only")

    def digest(self) -> str:
        h = hashlib.sha256()
        for part in (self.m, self.a, self.b, self.k, self.eta, self.J, self.gamma,
                     self.c, self.lam, self.w0, self.P, self.r, self.V,
                     [(s.kind, s.beta) for s in self.activations]):
            h.update(repr(np.asarray(part).tolist() if isinstance(part, np.ndarray) else part).encode())
        return h.hexdigest()[:16]


@dataclass
class NetworkState:
    """State g = (u_1..u_m, rho), with an optional weight matrix for the Hebbian model.

    The squared norm deliberately excludes the weights: ||g||^2 = sum u_i^2 + rho^2.
    """

    u: np.ndarray
    rho: float
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.rho = float(self.rho)
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)

    def norm_sq(self) -> float:
        return float(np.sum(self.u**2) + self.rho**2)

    def to_vector(self) -> np.ndarray:
        parts = [self.u, [self.rho]]
        if self.weights is not None:
            parts.append(self.weights.ravel())
        return np.concatenate([np.asarray(p, dtype=float).ravel() for p in parts])

    @staticmethod
    def from_vector(y: np.ndarray, m: int, has_weights: bool = False) -> "NetworkState":
        y = np.asarray(y, dtype=float)
        w = y[m + 1:].reshape(m, m) if has_weights else None
        return NetworkState(u=y[:m].copy(), rho=float(y[m]), weights=w)


def make_mhnn_rhs(p: MhnnParams):
    """Vector-field closure for the mHNN; operates on flat state y = (u, rho).

    Accepts batched states of shape (..., m+1).
    """
    m = p.m
    a, eta, w, J, gamma = p.a, p.eta, p.w, p.J, p.gamma
    k, b, P, r, V = p.k, p.b, p.P, p.r, p.V
    codes, betas = _activation_table(p.activations)
    wT = w.T.copy()
    linear = p.coupling_kind == "linear"

    def rhs(y: np.ndarray) -> np.ndarray:
        u = y[..., :m]
        rho = y[..., m:m + 1]
        fvec = _activation_values(codes, betas, u)
        du = -a * u + fvec @ wT + k * (1.0 - eta * rho**2) * u + J
        if P != 0.0:
            if linear:
                du -= P * (m * u - u.sum(axis=-1, keepdims=True))
            else:
                du -= P * u * sigmoid_gamma(u, r, V).sum(axis=-1, keepdims=True)
        drho = u @ gamma - b * rho[..., 0]
        return np.concatenate([du, drho[..., None]], axis=-1)

    return rhs


def make_hebbian_rhs(p: HebbianParams):
    """Vector-field closure for the Hebbian model; flat state y = (u, rho, w row-major)."""
    m = p.m
    a, k, eta, J, gamma = p.a, p.k, p.eta, p.J, p.gamma
    b, P = p.b, p.P
    c, lam = p.c, p.lam
    codes, betas = _activation_table(p.activations)

    def rhs(y: np.ndarray) -> np.ndarray:
        u = y[..., :m]
        rho = y[..., m:m + 1]
        W = y[..., m + 1:].reshape(*y.shape[:-1], m, m)
        fvec = _activation_values(codes, betas, u)
        du = (-a * u + np.einsum("...ij,...j->...i", W, fvec)
              + k * rho * (eta - rho) * u + J)
        if P != 0.0:
            du -= P * (m * u - u.sum(axis=-1, keepdims=True))
        drho = u @ gamma - b * rho[..., 0]
        dW = -c * W + lam * (fvec[..., :, None] * fvec[..., None, :])
        return np.concatenate([du, drho[..., None], dW.reshape(*y.shape[:-1], m * m)], axis=-1)

    return rhs


def mhnn_rhs(p: MhnnParams, s: NetworkState) -> NetworkState:
    """Time derivative of the mHNN at state s."""
    if s.weights is not None:
        raise ParameterError("state.weights", "mHNN state carries no weight matrix")
    if s.u.shape != (p.m,):
        raise ParameterError("state.u", f"expected {p.m} potentials, got shape {s.u.shape}")
    dy = make_mhnn_rhs(p)(s.to_vector())
    return NetworkState.from_vector(dy, p.m)


def hebbian_rhs(p: HebbianParams, s: NetworkState) -> NetworkState:
    """Time derivative of the Hebbian model at state s (weights required)."""
    if s.weights is None:
        raise ParameterError("state.weights", "hebbian state requires a weight matrix")
    if s.u.shape != (p.m,) or s.weights.shape != (p.m, p.m):
        raise ParameterError("state", f"state dimensions do not match m = {p.m}")
    dy = make_hebbian_rhs(p)(s.to_vector())
    return NetworkState.from_vector(dy, p.m, has_weights=True)
