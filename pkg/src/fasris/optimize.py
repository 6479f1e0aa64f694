"""Statistical-CSI RIS phase design.

The optimizer only sees the deterministic LoS components of both legs
(statistical CSI); it never touches instantaneous draws.  Phases live in
(0, 2pi], with 0 canonicalized to 2pi.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from fasris.errors import ValidationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseConfig:
    """Per-element RIS phase shifts, each in (0, 2pi]."""

    thetas: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.thetas, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ValidationError("thetas must be a nonempty 1-D vector")
        if not np.all(np.isfinite(t)):
            raise ValidationError("thetas must be finite")
        if np.any(t <= 0.0) or np.any(t > TWO_PI):
            raise ValidationError("thetas must lie in (0, 2pi]")
        object.__setattr__(self, "thetas", t)

    @property
    def M(self) -> int:
        return self.thetas.size


def los_objective(h_bar, phases: PhaseConfig, g_bar) -> float:
    """|sum_m h_bar(m) e^{j theta_m} conj(g_bar(m))|, the path-loss-free LoS cascade."""
    h = np.asarray(h_bar, dtype=complex)
    g = np.asarray(g_bar, dtype=complex)
    if h.shape != g.shape or h.shape != phases.thetas.shape:
        raise ValidationError("h_bar, g_bar and phases must have equal length")
    return abs(np.sum(h * np.exp(1j * phases.thetas) * np.conj(g)))


def optimal_phases(h_bar, g_bar) -> PhaseConfig:
    """Phases aligning every cascaded LoS term: theta_m = -(ang h_bar - ang g_bar).

    Maximizes los_objective, turning the sum into sum_m |h_bar(m)||g_bar(m)|.
    Zero-magnitude entries carry no phase information; their theta is set to
    the neutral 2pi and a RuntimeWarning is emitted.
    """
    h = np.asarray(h_bar, dtype=complex)
    g = np.asarray(g_bar, dtype=complex)
    if h.shape != g.shape or h.ndim != 1:
        raise ValidationError("h_bar and g_bar must be 1-D with equal length")
    dead = (np.abs(h) == 0.0) | (np.abs(g) == 0.0)
    if dead.any():
        warnings.warn(
            f"{int(dead.sum())} zero-magnitude LoS entries; their phases are neutral",
            RuntimeWarning,
            stacklevel=2,
        )
    theta = np.mod(-(np.angle(h) - np.angle(g)), TWO_PI)
    theta[theta == 0.0] = TWO_PI
    theta[dead] = TWO_PI
    return PhaseConfig(thetas=theta)


def random_phases(M: int, rng: np.random.Generator) -> PhaseConfig:
    """I.i.d. phases uniform on (0, 2pi]."""
    if M < 1:
        raise ValidationError("M must be at least 1")
    return PhaseConfig(thetas=TWO_PI * (1.0 - rng.random(M)))
