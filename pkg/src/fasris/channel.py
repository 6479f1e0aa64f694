"""Geometry, spatial correlation, and random channel generation.

The cascade link is BS -> RIS -> fluid-antenna user.  The BS-RIS leg is
deterministic line-of-sight (optionally Rician for simulation studies);
the RIS-user leg is Rician with ports correlated along the fluid antenna
either by the exact Jakes Toeplitz matrix or by its block-diagonal
constant-correlation approximation.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from fasris import specfun
from fasris.errors import DomainError, NumericError, ValidationError

MU_SQ_CAP = 1.0 - 1e-6  # block correlations are capped below one


@dataclass(frozen=True)
class SystemConfig:
    """Physical and run parameters of one FAS-RIS link."""

    bs_pos: tuple = (0.0, 0.0, 5.0)
    ris_pos: tuple = (15.0, 15.0, 5.0)
    user_pos: tuple = (50.0, 0.0, 0.0)
    N: int = 50                 # fluid-antenna port count
    M: int = 9                  # RIS element count
    W: float = 5.0              # normalized antenna length (wavelengths)
    K: float = 1.0              # Rician factor of the RIS-user channel (linear)
    P: float = 14.0             # transmit power (dBm)
    noise_power: float = -104.0  # noise power (dBm)
    R: float = 5.0              # target rate (bits/s/Hz)
    pl_exp_bs_ris: float = 2.2
    pl_exp_ris_user: float = 2.8
    pl_ref_db: float = 30.0     # reference path loss at 1 m (dB)
    seed: int = 1234
    los_angle_seed: int = 42
    bs_ris_model: str = "los"   # "los" (matches the analysis) or "rician"
    bs_ris_k: float = 1.0       # Rician factor of the BS-RIS leg (rician mode)

    def __post_init__(self):
        if self.N < 1 or self.M < 1:
            raise ValidationError("N and M must be at least 1")
        if not (self.W > 0.0):
            raise ValidationError("W must be positive")
        if not (self.K >= 0.0):
            raise ValidationError("K must be nonnegative")
        if not (self.pl_exp_bs_ris > 0.0 and self.pl_exp_ris_user > 0.0):
            raise ValidationError("path-loss exponents must be positive")
        if self.bs_ris_model not in ("los", "rician"):
            raise ValidationError(f"unknown bs_ris_model {self.bs_ris_model!r}")
        pts = [tuple(map(float, p)) for p in (self.bs_pos, self.ris_pos, self.user_pos)]
        if len(set(pts)) != 3:
            raise ValidationError("bs_pos, ris_pos, user_pos must be pairwise distinct")
        object.__setattr__(self, "bs_pos", pts[0])
        object.__setattr__(self, "ris_pos", pts[1])
        object.__setattr__(self, "user_pos", pts[2])

    @property
    def dist_bs_ris(self) -> float:
        return math.dist(self.bs_pos, self.ris_pos)

    @property
    def dist_ris_user(self) -> float:
        return math.dist(self.ris_pos, self.user_pos)

    def beta(self) -> float:
        """Linear path gain of the BS-RIS leg."""
        return path_loss(self.dist_bs_ris, self.pl_exp_bs_ris, self.pl_ref_db)

    def alpha(self) -> float:
        """Linear path gain of the RIS-user leg."""
        return path_loss(self.dist_ris_user, self.pl_exp_ris_user, self.pl_ref_db)


@dataclass(frozen=True)
class LosChannels:
    """Unit-modulus LoS steering entries of both legs (common to all ports)."""

    g_bar: np.ndarray  # BS-RIS, shape (M,)
    h_bar: np.ndarray  # RIS-user, shape (M,)

    def __post_init__(self):
        g = np.asarray(self.g_bar, dtype=complex)
        h = np.asarray(self.h_bar, dtype=complex)
        if g.shape != h.shape or g.ndim != 1:
            raise ValidationError("g_bar and h_bar must be 1-D with equal length")
        for name, v in (("g_bar", g), ("h_bar", h)):
            if not np.allclose(np.abs(v), 1.0, atol=1e-12):
                raise ValidationError(f"{name} entries must be unit modulus")
        object.__setattr__(self, "g_bar", g)
        object.__setattr__(self, "h_bar", h)


@dataclass(frozen=True)
class CorrelationPartition:
    """Block structure of the port-correlation approximation."""

    block_sizes: tuple
    block_mu_sq: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        mus = tuple(float(m) for m in self.block_mu_sq)
        if len(sizes) == 0 or len(sizes) != len(mus):
            raise ValidationError("block_sizes and block_mu_sq must be nonempty and equal length")
        if any(s < 1 for s in sizes):
            raise ValidationError("every block size must be at least 1")
        if any(not (0.0 <= m < 1.0) for m in mus):
            raise ValidationError("every block mu^2 must lie in [0, 1)")
        mus = tuple(min(m, MU_SQ_CAP) for m in mus)
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "block_mu_sq", mus)

    @property
    def B(self) -> int:
        return len(self.block_sizes)

    @property
    def n_ports(self) -> int:
        return sum(self.block_sizes)

    def port_block_index(self) -> np.ndarray:
        """Block index of each port (blocks are contiguous port ranges)."""
        return np.repeat(np.arange(self.B), self.block_sizes)

    def port_mu(self) -> np.ndarray:
        """Per-port sqrt(mu_b^2) in port order."""
        return np.repeat(np.sqrt(np.asarray(self.block_mu_sq)), self.block_sizes)


@dataclass(frozen=True)
class ChannelRealization:
    """Cascaded per-port complex gains h_k Phi g^H of one draw."""

    port_gains: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.port_gains, dtype=complex)
        if g.ndim != 1 or g.size == 0:
            raise ValidationError("port_gains must be a nonempty 1-D vector")
        if not np.all(np.isfinite(g.view(float))):
            raise ValidationError("port_gains must be finite")
        object.__setattr__(self, "port_gains", g)


def path_loss(dist: float, exponent: float, ref_db: float) -> float:
    """Linear power gain 10^(-ref_db/10) * dist^(-exponent) at dist meters."""
    if not (dist > 0.0):
        raise DomainError(f"path_loss requires dist > 0, got {dist!r}")
    return 10.0 ** (-ref_db / 10.0) * float(dist) ** (-float(exponent))


def generate_los(M: int, rng: np.random.Generator) -> LosChannels:
    """Draw unit-modulus LoS entries with phases uniform on [0, 2pi).

    g_bar is drawn first, then h_bar; the draw order is part of the
    reproducibility contract.
    """
    if M < 1:
        raise ValidationError("M must be at least 1")
    theta_g = rng.uniform(0.0, 2.0 * math.pi, size=M)
    theta_h = rng.uniform(0.0, 2.0 * math.pi, size=M)
    return LosChannels(g_bar=np.exp(1j * theta_g), h_bar=np.exp(1j * theta_h))


def jakes_matrix(N: int, W: float) -> np.ndarray:
    """Jakes spatial correlation of N ports over W wavelengths.

    Toeplitz with first row J0(2 pi (k-1) W / (N-1)); the 1x1 identity for
    N = 1.
    """
    if N < 1:
        raise ValidationError("N must be at least 1")
    if not (W > 0.0):
        raise ValidationError("W must be positive")
    if N == 1:
        return np.ones((1, 1))
    lags = np.arange(N)
    row = np.array([specfun.bessel_j0(2.0 * math.pi * k * W / (N - 1)) for k in lags])
    idx = np.abs(np.subtract.outer(lags, lags))
    return row[idx]


def bdma_partition(
    sigma: np.ndarray,
    policy: str = "heuristic",
    tau: float = 0.97,
    sizes=None,
    mu_sq=None,
) -> CorrelationPartition:
    """Partition the port-correlation matrix into constant-correlation blocks.

    policy "heuristic": grow each contiguous block while the minimum squared
    pairwise correlation stays >= tau; that minimum becomes the block's
    mu^2 (capped below one).  Singleton blocks get mu^2 = 0.5, which is
    immaterial because the single-port block marginal does not depend on
    the split between shared and private scatter.

    policy "explicit": validate and adopt user-supplied sizes and mu^2
    (scalar mu_sq is broadcast to all blocks).

    policy "eigen": eigenvalue matching with a common target mu^2 (given by
    mu_sq, default tau).  A constant-correlation block of size L contributes
    one dominant eigenvalue 1 + (L-1) mu^2 and L-1 weak ones at 1 - mu^2,
    so the block count is set to the number of eigenvalues of sigma at or
    above the weak-mode power 1 - mu^2, block b takes
    L_b ~ 1 + (lambda_b - 1)/mu^2 ports to match the b-th eigenvalue, and
    the sizes are repaired to sum to N (trim the largest, pad round-robin).
    This is the documented stand-in for an externally published block-size
    search and the default for experiment sweeps.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValidationError("sigma must be a square matrix")
    n = sigma.shape[0]
    if policy == "explicit":
        if sizes is None or mu_sq is None:
            raise ValidationError("explicit policy requires sizes and mu_sq")
        sizes = [int(s) for s in sizes]
        if sum(sizes) != n:
            raise ValidationError(f"explicit sizes sum to {sum(sizes)}, expected {n}")
        if np.isscalar(mu_sq):
            mus = [float(mu_sq)] * len(sizes)
        else:
            mus = [float(m) for m in mu_sq]
            if len(mus) != len(sizes):
                raise ValidationError("mu_sq list length must match sizes")
        return CorrelationPartition(tuple(sizes), tuple(mus))
    if policy == "heuristic":
        if n == 1:
            return CorrelationPartition((1,), (0.5,))
        sizes = []
        mus = []
        start = 0
        cur_min = math.inf
        for j in range(1, n + 1):
            if j < n:
                cand = min((sigma[p, j] ** 2 for p in range(start, j)), default=math.inf)
                if min(cur_min, cand) >= tau:
                    cur_min = min(cur_min, cand)
                    continue
            size = j - start
            sizes.append(size)
            mus.append(0.5 if size == 1 else min(cur_min, MU_SQ_CAP))
            start = j
            cur_min = math.inf
        return CorrelationPartition(tuple(sizes), tuple(mus))
    if policy == "eigen":
        target = float(tau if mu_sq is None else mu_sq)
        if not (0.0 < target < 1.0):
            raise ValidationError("eigen policy needs a target mu^2 in (0, 1)")
        if n == 1:
            return CorrelationPartition((1,), (target,))
        lam = np.sort(np.linalg.eigvalsh(sigma))[::-1]
        b_cnt = int(np.count_nonzero(lam >= 1.0 - target))
        b_cnt = max(1, min(b_cnt, n))
        sizes = [max(1, int(round(1.0 + (lb - 1.0) / target))) for lb in lam[:b_cnt]]
        total = sum(sizes)
        while total > n:
            j = int(np.argmax(sizes))
            if sizes[j] > 1:
                sizes[j] -= 1
            else:
                sizes.pop()
            total -= 1
        j = len(sizes) - 1
        while total < n:
            sizes[j] += 1
            total += 1
            j = j - 1 if j > 0 else len(sizes) - 1
        return CorrelationPartition(tuple(sizes), tuple([target] * len(sizes)))
    raise ValidationError(f"unknown partition policy {policy!r}")


def _cascade_weights(cfg: SystemConfig, los: LosChannels, phases) -> np.ndarray:
    """RIS combining vector w with gains = H @ w, for deterministic g."""
    g = math.sqrt(cfg.beta()) * los.g_bar
    return np.exp(1j * np.asarray(phases.thetas)) * np.conj(g)


def _nlos_scale(cfg: SystemConfig) -> float:
    """Per-element standard deviation of one real dimension of the scatter."""
    return math.sqrt(cfg.alpha() / (cfg.K + 1.0) / 2.0)


def _los_matrix(cfg: SystemConfig, los: LosChannels) -> np.ndarray:
    """Deterministic RIS-user LoS component, common to all ports; (N, M)."""
    coef = math.sqrt(cfg.alpha() * cfg.K / (cfg.K + 1.0))
    return np.broadcast_to(coef * los.h_bar, (cfg.N, cfg.M))


def _bs_ris_draw(cfg: SystemConfig, los: LosChannels, normals) -> np.ndarray:
    """Per-trial BS-RIS vector g in "rician" mode (normals: 2M floats)."""
    kb = cfg.bs_ris_k
    gtilde = (normals[0::2] + 1j * normals[1::2]) / math.sqrt(2.0)
    bar = math.sqrt(kb / (kb + 1.0)) * los.g_bar
    return math.sqrt(cfg.beta()) * (bar + math.sqrt(1.0 / (kb + 1.0)) * gtilde)


def block_normals_per_trial(cfg: SystemConfig, part: CorrelationPartition) -> int:
    """Standard normals one block-model trial consumes."""
    n = 2 * cfg.M * (part.B + cfg.N)
    if cfg.bs_ris_model == "rician":
        n += 2 * cfg.M
    return n


def toeplitz_normals_per_trial(cfg: SystemConfig) -> int:
    """Standard normals one Toeplitz-model trial consumes."""
    n = 2 * cfg.M * cfg.N
    if cfg.bs_ris_model == "rician":
        n += 2 * cfg.M
    return n


def sample_block_channels(
    cfg: SystemConfig,
    part: CorrelationPartition,
    los: LosChannels,
    phases,
    rng: np.random.Generator,
) -> ChannelRealization:
    """One cascaded-gain draw under the block correlation model.

    Each block shares one scatter vector; every port adds its own private
    scatter, both complex normal with per-element variance alpha/(K+1).
    All normals for the trial come from a single generator call in a fixed
    order (optional BS-RIS draw, then shared block vectors, then per-port
    vectors, real/imag interleaved).
    """
    if part.n_ports != cfg.N:
        raise ValidationError(f"partition covers {part.n_ports} ports, config has {cfg.N}")
    raw = rng.standard_normal(block_normals_per_trial(cfg, part))
    gains = _block_gains_batch(cfg, part, los, phases, raw[np.newaxis, :])[0]
    return ChannelRealization(port_gains=gains)


def _block_gains_batch(cfg, part, los, phases, raw):
    """Cascaded gains for a batch of block-model normal draws; (T, N)."""
    t_cnt = raw.shape[0]
    m = cfg.M
    b_cnt = part.B
    scale = _nlos_scale(cfg)
    ofs = 0
    if cfg.bs_ris_model == "rician":
        g_norm = raw[:, : 2 * m]
        ofs = 2 * m
    shared = raw[:, ofs : ofs + 2 * m * b_cnt].reshape(t_cnt, b_cnt, m, 2)
    priv = raw[:, ofs + 2 * m * b_cnt :].reshape(t_cnt, cfg.N, m, 2)
    shared = scale * (shared[..., 0] + 1j * shared[..., 1])
    priv = scale * (priv[..., 0] + 1j * priv[..., 1])
    blk = part.port_block_index()
    mu = part.port_mu()[:, np.newaxis]
    h = _los_matrix(cfg, los) + mu * shared[:, blk, :] + np.sqrt(1.0 - mu**2) * priv
    if cfg.bs_ris_model == "rician":
        phase_fac = np.exp(1j * np.asarray(phases.thetas))
        out = np.empty((t_cnt, cfg.N), dtype=complex)
        for t in range(t_cnt):
            w = phase_fac * np.conj(_bs_ris_draw(cfg, los, g_norm[t]))
            out[t] = h[t] @ w
        return out
    return h @ _cascade_weights(cfg, los, phases)


@lru_cache(maxsize=8)
def _sym_sqrt_cached(key, shape):
    sigma = np.frombuffer(key).reshape(shape)
    lam, vec = np.linalg.eigh(sigma)
    if lam.min() < -1e-8 * max(1.0, lam.max()):
        raise NumericError(
            f"correlation matrix is not PSD: smallest eigenvalue {lam.min():.3e}"
        )
    lam = np.maximum(lam, 0.0)
    return (vec * np.sqrt(lam)) @ vec.T


def toeplitz_factor(sigma: np.ndarray) -> np.ndarray:
    """Symmetric square root of sigma with eigenvalues floored at zero."""
    sigma = np.ascontiguousarray(sigma, dtype=float)
    return _sym_sqrt_cached(sigma.tobytes(), sigma.shape)


def sample_toeplitz_channels(
    cfg: SystemConfig,
    sigma: np.ndarray,
    los: LosChannels,
    phases,
    rng: np.random.Generator,
) -> ChannelRealization:
    """One cascaded-gain draw under the exact correlation matrix sigma.

    Per RIS element, the across-port scatter is L z with L the symmetric
    square root of sigma and z i.i.d. complex normal.
    """
    if sigma.shape != (cfg.N, cfg.N):
        raise ValidationError(f"sigma must be {cfg.N}x{cfg.N}, got {sigma.shape}")
    raw = rng.standard_normal(toeplitz_normals_per_trial(cfg))
    gains = _toeplitz_gains_batch(cfg, toeplitz_factor(sigma), los, phases, raw[np.newaxis, :])[0]
    return ChannelRealization(port_gains=gains)


def _toeplitz_gains_batch(cfg, factor, los, phases, raw):
    """Cascaded gains for a batch of Toeplitz-model normal draws; (T, N)."""
    t_cnt = raw.shape[0]
    m = cfg.M
    scale = _nlos_scale(cfg) * math.sqrt(2.0)  # z is unit complex normal
    ofs = 0
    if cfg.bs_ris_model == "rician":
        g_norm = raw[:, : 2 * m]
        ofs = 2 * m
    z = raw[:, ofs:].reshape(t_cnt, cfg.N, m, 2)
    z = (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)
    h = _los_matrix(cfg, los) + scale * np.einsum("ij,tjm->tim", factor, z)
    if cfg.bs_ris_model == "rician":
        phase_fac = np.exp(1j * np.asarray(phases.thetas))
        out = np.empty((t_cnt, cfg.N), dtype=complex)
        for t in range(t_cnt):
            w = phase_fac * np.conj(_bs_ris_draw(cfg, los, g_norm[t]))
            out[t] = h[t] @ w
        return out
    return h @ _cascade_weights(cfg, los, phases)
