"""Switched SISO ARX benchmark system with noise-to-signal-ratio scaled noise."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .linalg import RngStream


@dataclass(frozen=True)
class ArxRegime:
    """y_t = sum_i a[i-1] y_{t-i} + sum_i b[i-1] u_{t-i}, lags starting at 1."""

    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self):
        a, b = tuple(map(float, self.a)), tuple(map(float, self.b))
        if not a or not b:
            raise InvalidInput("regime needs at least one output and one input lag")
        if not np.all(np.isfinite(a + b)):
            raise InvalidInput("non-finite ARX coefficient")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def max_lag(self) -> int:
        return max(len(self.a), len(self.b))

    def poles(self) -> np.ndarray:
        return np.roots((1.0,) + tuple(-x for x in self.a))


REGIME_1 = ArxRegime(a=(0.3, -0.02), b=(0.6, 0.2))
REGIME_2 = ArxRegime(a=(1.5, -0.74, 0.12), b=(0.6, 0.2, 0.05))


@dataclass(frozen=True)
class SwitchedArx:
    regime1: ArxRegime = REGIME_1
    regime2: ArxRegime = REGIME_2
    T_switch: int = 100

    def __post_init__(self):
        if self.T_switch < self.regime2.max_lag:
            raise InvalidInput("T_switch must be at least the regime-2 lag")

    def regime_at(self, t: int) -> ArxRegime:
        return self.regime1 if t < self.T_switch else self.regime2


@dataclass(frozen=True)
class NsrModel:
    sigma: float = 0.0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise InvalidInput("sigma must be non-negative")


def simulate(sys: SwitchedArx, u) -> np.ndarray:
    """Outputs for input ``u`` from rest (u_t = y_t = 0 for t < 0)."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if not np.all(np.isfinite(u)):
        raise InvalidInput("input has non-finite entries")
    y = np.zeros_like(u)
    for t in range(u.size):
        reg = sys.regime_at(t)
        acc = 0.0
        for i, ai in enumerate(reg.a, start=1):
            if t - i >= 0:
                acc += ai * y[t - i]
        for i, bi in enumerate(reg.b, start=1):
            if t - i >= 0:
                acc += bi * u[t - i]
        y[t] = acc
    return y


def nsr_noise(y, sigma: float, z) -> np.ndarray:
    """eta_t = sigma * ||y_t|| * z_t for pre-drawn standard normals ``z``.

    Splitting the standard-normal draw from the scaling lets every noise level
    share one noise realization.
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float).reshape(y.shape)
    scale = np.abs(y) if y.ndim == 1 else np.linalg.norm(y, axis=1, keepdims=True)
    return sigma * scale * z


def add_nsr_noise(y, model: NsrModel, rng: RngStream) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    z = rng.generator.standard_normal(y.shape)
    return y + nsr_noise(y, model.sigma, z)


def gen_input(rng: RngStream, T_sim: int) -> np.ndarray:
    """i.i.d. standard normal scalar inputs."""
    return rng.generator.standard_normal(int(T_sim))
