"""Flat key-value experiment configuration.

The config file is plain text, one ``key = value`` per line, ``#`` starts a
comment.  System keys match the SystemConfig field names exactly; the
remaining keys select the partition policy, phase scheme, Monte-Carlo run,
and quadrature tolerances.  ``fasris config print-defaults`` emits a
commented template.
"""

from dataclasses import dataclass

import numpy as np

from fasris import optimize
from fasris.channel import CorrelationPartition, SystemConfig, bdma_partition, jakes_matrix
from fasris.errors import ValidationError
from fasris.montecarlo import McSpec
from fasris.quadrature import QuadratureSpec


@dataclass(frozen=True)
class RunSettings:
    """Everything an experiment needs beyond the physical SystemConfig."""

    partition_policy: str = "eigen"     # eigen | heuristic | explicit
    partition_tau: float = 0.97
    partition_mu_sq: float = 0.97
    partition_sizes: tuple = ()         # explicit policy only
    strict_common_mu: bool = False
    phase_scheme: str = "optimal"       # optimal | random
    phase_seed: int = 7
    mc_trials: int = 100_000
    mc_model: str = "block"             # block | toeplitz
    mc_batch: int = 4096
    quad_rel_tol: float = 1e-9
    quad_abs_tol: float = 1e-300
    quad_max_subdivisions: int = 200
    quad_truncation_sigmas: float = 12.0

    def __post_init__(self):
        if self.partition_policy not in ("eigen", "heuristic", "explicit"):
            raise ValidationError(f"unknown partition_policy {self.partition_policy!r}")
        if self.phase_scheme not in ("optimal", "random"):
            raise ValidationError(f"unknown phase_scheme {self.phase_scheme!r}")

    def make_partition(self, cfg: SystemConfig) -> CorrelationPartition:
        sigma = jakes_matrix(cfg.N, cfg.W)
        if self.partition_policy == "explicit":
            return bdma_partition(sigma, policy="explicit",
                                  sizes=list(self.partition_sizes),
                                  mu_sq=self.partition_mu_sq)
        if self.partition_policy == "heuristic":
            return bdma_partition(sigma, policy="heuristic", tau=self.partition_tau)
        return bdma_partition(sigma, policy="eigen", mu_sq=self.partition_mu_sq)

    def make_phases(self, los) -> optimize.PhaseConfig:
        if self.phase_scheme == "optimal":
            return optimize.optimal_phases(los.h_bar, los.g_bar)
        rng = np.random.default_rng(self.phase_seed)
        return optimize.random_phases(los.h_bar.size, rng)

    def make_mc(self, cfg: SystemConfig) -> McSpec:
        return McSpec(trials=self.mc_trials, seed=cfg.seed,
                      model=self.mc_model, batch=self.mc_batch)

    def make_quad(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.quad_rel_tol, abs_tol=self.quad_abs_tol,
                              max_subdivisions=self.quad_max_subdivisions,
                              truncation_sigmas=self.quad_truncation_sigmas)


def _parse_bool(s):
    low = s.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValidationError(f"expected a boolean, got {s!r}")


def _parse_vec3(s):
    parts = [p for p in s.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise ValidationError(f"expected three coordinates, got {s!r}")
    return tuple(float(p) for p in parts)


def _parse_int_list(s):
    parts = [p for p in s.replace(",", " ").split() if p]
    return tuple(int(p) for p in parts)


def _parse_float(s):
    v = float(s)
    return v


_SYSTEM_PARSERS = {
    "bs_pos": _parse_vec3,
    "ris_pos": _parse_vec3,
    "user_pos": _parse_vec3,
    "N": int,
    "M": int,
    "W": _parse_float,
    "K": _parse_float,
    "P": _parse_float,
    "noise_power": _parse_float,
    "R": _parse_float,
    "pl_exp_bs_ris": _parse_float,
    "pl_exp_ris_user": _parse_float,
    "pl_ref_db": _parse_float,
    "seed": int,
    "los_angle_seed": int,
    "bs_ris_model": str.strip,
    "bs_ris_k": _parse_float,
}

_RUN_PARSERS = {
    "partition_policy": str.strip,
    "partition_tau": _parse_float,
    "partition_mu_sq": _parse_float,
    "partition_sizes": _parse_int_list,
    "strict_common_mu": _parse_bool,
    "phase_scheme": str.strip,
    "phase_seed": int,
    "mc_trials": int,
    "mc_model": str.strip,
    "mc_batch": int,
    "quad_rel_tol": _parse_float,
    "quad_abs_tol": _parse_float,
    "quad_max_subdivisions": int,
    "quad_truncation_sigmas": _parse_float,
}


def parse_config_text(text: str):
    """Parse config text into (SystemConfig, RunSettings)."""
    sys_kw = {}
    run_kw = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        try:
            if key in _SYSTEM_PARSERS:
                if val:
                    sys_kw[key] = _SYSTEM_PARSERS[key](val)
            elif key in _RUN_PARSERS:
                if val:
                    run_kw[key] = _RUN_PARSERS[key](val)
            else:
                raise ValidationError(f"line {lineno}: unknown config key {key!r}")
        except (ValueError, TypeError) as exc:
            raise ValidationError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    return SystemConfig(**sys_kw), RunSettings(**run_kw)


def load_config(path: str):
    """Read and parse a config file into (SystemConfig, RunSettings)."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def config_template() -> str:
    """Commented template carrying every key at its default value."""
    c = SystemConfig()
    lines = [
        "# fasris experiment configuration (flat key = value; '#' comments)",
        "",
        "# --- geometry and link physics ---",
        f"bs_pos = {c.bs_pos[0]:g}, {c.bs_pos[1]:g}, {c.bs_pos[2]:g}      # BS position (m)",
        f"ris_pos = {c.ris_pos[0]:g}, {c.ris_pos[1]:g}, {c.ris_pos[2]:g}   # RIS position (m)",
        f"user_pos = {c.user_pos[0]:g}, {c.user_pos[1]:g}, {c.user_pos[2]:g}   # user position (m)",
        f"N = {c.N}                    # fluid-antenna port count",
        f"M = {c.M}                     # RIS element count",
        f"W = {c.W:g}                   # normalized antenna length (wavelengths)",
        f"K = {c.K:g}                   # Rician factor of the RIS-user channel (linear)",
        f"P = {c.P:g}                  # transmit power (dBm)",
        f"noise_power = {c.noise_power:g}        # noise power (dBm)",
        f"R = {c.R:g}                   # target rate (bits/s/Hz)",
        f"pl_exp_bs_ris = {c.pl_exp_bs_ris:g}       # BS-RIS path-loss exponent",
        f"pl_exp_ris_user = {c.pl_exp_ris_user:g}     # RIS-user path-loss exponent (free parameter)",
        f"pl_ref_db = {c.pl_ref_db:g}          # reference path loss at 1 m (dB, free parameter)",
        f"seed = {c.seed}               # Monte-Carlo base seed",
        f"los_angle_seed = {c.los_angle_seed}       # seed for the LoS phase draws",
        f"bs_ris_model = {c.bs_ris_model}        # los (matches the analysis) | rician",
        f"bs_ris_k = {c.bs_ris_k:g}            # BS-RIS Rician factor (rician mode only)",
        "",
        "# --- port-correlation partition ---",
        "partition_policy = eigen   # eigen | heuristic | explicit",
        "partition_tau = 0.97       # heuristic: min pairwise squared correlation",
        "partition_mu_sq = 0.97     # eigen/explicit: block correlation parameter",
        "partition_sizes =          # explicit: comma-separated block sizes summing to N",
        "strict_common_mu = false   # reject heterogeneous block mu^2 in closed forms",
        "",
        "# --- RIS phase scheme ---",
        "phase_scheme = optimal     # optimal | random",
        "phase_seed = 7             # random scheme only",
        "",
        "# --- Monte Carlo ---",
        "mc_trials = 100000",
        "mc_model = block           # block | toeplitz",
        "mc_batch = 4096            # trials per work unit (does not affect results)",
        "",
        "# --- quadrature ---",
        "quad_rel_tol = 1e-9",
        "quad_abs_tol = 1e-300",
        "quad_max_subdivisions = 200",
        "quad_truncation_sigmas = 12",
        "",
    ]
    return "\n".join(lines)
