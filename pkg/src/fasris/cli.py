"""Experiment orchestration CLI.

Subcommands
-----------
sweep-power      outage versus transmit power (all analytic variants + MC)
sweep-ports      outage versus port count, partition recomputed per N
compare-phases   optimal versus random RIS phases over the power grid
config print-defaults   emit a commented config template
oracle gen       regenerate the extended-precision golden tables (hidden)

Output is CSV (comment lines prefixed '#') or JSON.  For fixed inputs and
seeds the bytes are stable: no timestamps are emitted, probabilities are
printed with 17 significant digits, and per-trial counter-based RNG makes
the Monte-Carlo columns independent of batching.
"""

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from fasris import __version__, analysis, backend, channel, montecarlo, optimize
from fasris.config_io import config_template, load_config
from fasris.errors import FasrisError, NumericError, ValidationError

MC_FLOOR = 1e-7  # below this analytic outage the MC column is unavailable

_COLUMNS = (
    "outage_bdma",
    "outage_upper",
    "outage_lower",
    "outage_asymptotic",
    "outage_mc",
    "mc_ci_halfwidth",
)


@dataclass
class SweepRow:
    axis_value: float
    outage_bdma: float = None
    outage_upper: float = None
    outage_lower: float = None
    outage_asymptotic: float = None
    outage_mc: float = None
    mc_ci_halfwidth: float = None
    flags: str = "ok"
    extra: dict = field(default_factory=dict)


@dataclass
class SweepResult:
    axis_name: str
    rows: list
    metadata: dict
    extra_columns: tuple = ()
    numeric_errors: int = 0

    def to_csv(self) -> str:
        lines = [f"# fasris {self.metadata.get('command', '')} v{__version__}"]
        for k, v in self.metadata.items():
            if k != "command":
                lines.append(f"# {k}={v}")
        cols = (self.axis_name,) + _COLUMNS + self.extra_columns + ("flags",)
        lines.append(",".join(cols))
        for r in self.rows:
            cells = [repr(float(r.axis_value))]
            for c in _COLUMNS:
                cells.append(_fmt(getattr(r, c)))
            for c in self.extra_columns:
                cells.append(_fmt(r.extra.get(c)))
            cells.append(r.flags)
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        rows = []
        for r in self.rows:
            d = {self.axis_name: r.axis_value}
            for c in _COLUMNS:
                d[c] = getattr(r, c)
            for c in self.extra_columns:
                d[c] = r.extra.get(c)
            d["flags"] = r.flags
            rows.append(d)
        return json.dumps({"metadata": self.metadata, "rows": rows}, indent=2) + "\n"

    def write(self, out_path, fmt: str):
        text = self.to_csv() if fmt == "csv" else self.to_json()
        if out_path is None or out_path == "-":
            sys.stdout.write(text)
        else:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)


def _fmt(v) -> str:
    return "" if v is None else f"{float(v):.16e}"


def _power_grid(p_min: float, p_max: float, step: float):
    if p_min > p_max:
        raise ValidationError("p_min must not exceed p_max")
    if not (step > 0.0):
        raise ValidationError("step must be positive")
    grid = [p_min]
    while grid[-1] + step <= p_max + 1e-12:
        grid.append(grid[-1] + step)
    return grid


def _experiment(config_path: str, seed_override):
    cfg, run = load_config(config_path)
    if seed_override is not None:
        cfg = replace(cfg, seed=int(seed_override))
    with open(config_path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    return cfg, run, digest


def _metadata(command, cfg, run, digest):
    return {
        "command": command,
        "config_sha256": digest,
        "seed": cfg.seed,
        "los_angle_seed": cfg.los_angle_seed,
        "mc_trials": run.mc_trials,
        "mc_model": run.mc_model,
        "backend": backend.backend_name(),
        "version": __version__,
    }


def _analytic_row(q, part, stats, quad, strict):
    """One row of analytic variants; numeric failures flag the cell."""
    row = {}
    errors = 0
    underflow = False
    try:
        ev = analysis.outage_bdma_eval(q, quad)
        row["outage_bdma"] = ev.value
        underflow = underflow or ev.underflow
    except NumericError:
        errors += 1
    try:
        row["outage_upper"] = analysis.outage_upper(part.B, stats, q.gamma_th)
    except NumericError:
        errors += 1
    try:
        row["outage_lower"] = analysis.outage_lower(q, strict_common_mu=strict)
    except NumericError:
        errors += 1
    try:
        row["outage_asymptotic"] = analysis.outage_asymptotic(q)
    except NumericError:
        errors += 1
    return row, errors, underflow


def _mc_cell(row, gamma_th, samples, trials):
    """Attach the MC estimate where the analytic value supports it."""
    if gamma_th == 0.0:
        row.outage_mc = 0.0
        row.mc_ci_halfwidth = 0.0
        return False
    bdma = row.outage_bdma
    if bdma is None or bdma < MC_FLOOR:
        return True
    est = montecarlo.estimate_from_samples(samples(), gamma_th)
    row.outage_mc = est.outage
    row.mc_ci_halfwidth = est.ci_halfwidth
    return False


class _LazySamples:
    """Draw the per-trial best-port powers at most once per configuration."""

    def __init__(self, cfg, part, los, phases, mc):
        self._args = (cfg, part, los, phases, mc)
        self._samples = None

    def __call__(self):
        if self._samples is None:
            self._samples = montecarlo.amax_sq_samples(*self._args)
        return self._samples


def sweep_power(config_path, p_min=0.0, p_max=20.0, step_db=2.0,
                out_path=None, fmt="csv", seed_override=None) -> SweepResult:
    """Outage versus transmit power: analytic variants plus the MC estimate."""
    cfg, run, digest = _experiment(config_path, seed_override)
    powers = _power_grid(p_min, p_max, step_db)
    los = channel.generate_los(cfg.M, np.random.default_rng(cfg.los_angle_seed))
    phases = run.make_phases(los)
    part = run.make_partition(cfg)
    stats = analysis.cascaded_stats(cfg, los, phases)
    quad = run.make_quad()
    samples = _LazySamples(cfg, part, los, phases, run.make_mc(cfg))
    rows = []
    n_errors = 0
    for p_dbm in powers:
        gamma = analysis.normalized_threshold(cfg.R, p_dbm, cfg.noise_power)
        q = analysis.OutageQuery(gamma, part, stats)
        vals, errs, under = _analytic_row(q, part, stats, quad, run.strict_common_mu)
        n_errors += errs
        row = SweepRow(axis_value=p_dbm, **vals)
        unavailable = _mc_cell(row, gamma, samples, run.mc_trials)
        row.flags = _flags(errs, under, unavailable)
        rows.append(row)
    res = SweepResult("P_dbm", rows, _metadata("sweep-power", cfg, run, digest),
                      numeric_errors=n_errors)
    res.write(out_path, fmt)
    return res


def sweep_ports(config_path, n_list=(10, 20, 30, 40, 50),
                out_path=None, fmt="csv", seed_override=None) -> SweepResult:
    """Outage versus port count; the partition is recomputed per N."""
    n_list = [int(n) for n in n_list]
    if len(n_list) == 0:
        raise ValidationError("n_list must be nonempty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValidationError("n_list must be strictly increasing (no duplicates)")
    cfg, run, digest = _experiment(config_path, seed_override)
    los = channel.generate_los(cfg.M, np.random.default_rng(cfg.los_angle_seed))
    phases = run.make_phases(los)
    quad = run.make_quad()
    rows = []
    n_errors = 0
    for n in n_list:
        cfg_n = replace(cfg, N=n)
        part = run.make_partition(cfg_n)
        stats = analysis.cascaded_stats(cfg_n, los, phases)
        gamma = analysis.normalized_threshold(cfg_n.R, cfg_n.P, cfg_n.noise_power)
        q = analysis.OutageQuery(gamma, part, stats)
        vals, errs, under = _analytic_row(q, part, stats, quad, run.strict_common_mu)
        n_errors += errs
        row = SweepRow(axis_value=n, **vals)
        samples = _LazySamples(cfg_n, part, los, phases, run.make_mc(cfg_n))
        unavailable = _mc_cell(row, gamma, samples, run.mc_trials)
        row.flags = _flags(errs, under, unavailable)
        rows.append(row)
    meta = _metadata("sweep-ports", cfg, run, digest)
    bdma = [r.outage_bdma for r in rows if r.outage_bdma is not None]
    violations = sum(1 for a, b in zip(bdma, bdma[1:]) if b > a + 1e-9)
    if violations:
        meta["monotonicity_violations"] = violations
        print(f"warning: BDMA column not nonincreasing in N ({violations} rises)",
              file=sys.stderr)
    res = SweepResult("N", rows, meta, numeric_errors=n_errors)
    res.write(out_path, fmt)
    return res


def compare_phases(config_path, out_path=None, fmt="csv", random_seeds=1,
                   p_min=0.0, p_max=20.0, step_db=2.0, seed_override=None) -> SweepResult:
    """Optimal versus random RIS phases over the power grid.

    The standard columns carry the optimal-phase series; the appended
    ``*_random`` columns carry the mean over `random_seeds` random phase
    configurations (per-configuration seeds derived from phase_seed).
    """
    if random_seeds < 1:
        raise ValidationError("random_seeds must be at least 1")
    cfg, run, digest = _experiment(config_path, seed_override)
    powers = _power_grid(p_min, p_max, step_db)
    los = channel.generate_los(cfg.M, np.random.default_rng(cfg.los_angle_seed))
    part = run.make_partition(cfg)
    quad = run.make_quad()
    mc = run.make_mc(cfg)
    schemes = [optimize.optimal_phases(los.h_bar, los.g_bar)]
    for r in range(random_seeds):
        rng = np.random.Generator(np.random.Philox(key=((run.phase_seed & (2**64 - 1)) << 64) | r))
        schemes.append(optimize.random_phases(cfg.M, rng))
    all_stats = [analysis.cascaded_stats(cfg, los, ph) for ph in schemes]
    all_samples = [_LazySamples(cfg, part, los, ph, mc) for ph in schemes]
    rows = []
    n_errors = 0
    for p_dbm in powers:
        gamma = analysis.normalized_threshold(cfg.R, p_dbm, cfg.noise_power)
        per_scheme = []
        under_any = False
        errs_total = 0
        for stats, samples in zip(all_stats, all_samples):
            q = analysis.OutageQuery(gamma, part, stats)
            vals, errs, under = _analytic_row(q, part, stats, quad, run.strict_common_mu)
            errs_total += errs
            under_any = under_any or under
            row = SweepRow(axis_value=p_dbm, **vals)
            unavailable = _mc_cell(row, gamma, samples, run.mc_trials)
            per_scheme.append((row, unavailable))
        n_errors += errs_total
        opt_row, opt_unavailable = per_scheme[0]
        rnd = [r for r, _ in per_scheme[1:]]
        rnd_unavailable = any(u for _, u in per_scheme[1:])
        opt_row.extra["outage_bdma_random"] = _mean([r.outage_bdma for r in rnd])
        opt_row.extra["outage_mc_random"] = _mean([r.outage_mc for r in rnd])
        cis = [r.mc_ci_halfwidth for r in rnd]
        if all(c is not None for c in cis):
            opt_row.extra["mc_ci_halfwidth_random"] = (
                math.sqrt(sum(c * c for c in cis)) / len(cis))
        opt_row.flags = _flags(errs_total, under_any, opt_unavailable or rnd_unavailable)
        rows.append(opt_row)
    meta = _metadata("compare-phases", cfg, run, digest)
    meta["random_seeds"] = random_seeds
    res = SweepResult("P_dbm", rows, meta,
                      extra_columns=("outage_bdma_random", "outage_mc_random",
                                     "mc_ci_halfwidth_random"),
                      numeric_errors=n_errors)
    res.write(out_path, fmt)
    return res


def _mean(vals):
    if any(v is None for v in vals):
        return None
    return sum(vals) / len(vals)


def _flags(errors: int, underflow: bool, mc_unavailable: bool) -> str:
    if errors:
        return "error"
    if underflow:
        return "underflow"
    if mc_unavailable:
        return "mc_unavailable"
    return "ok"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fasris",
        description="Outage analysis of RIS-assisted fluid-antenna links.",
    )
    parser.add_argument("--version", action="version", version=f"fasris {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_grid=True):
        p.add_argument("--config", required=True, help="path to the flat key=value config")
        p.add_argument("--out", default=None, help="output path ('-' or omitted: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if with_grid:
            p.add_argument("--p-min", type=float, default=0.0, help="grid start (dBm)")
            p.add_argument("--p-max", type=float, default=20.0, help="grid end (dBm)")
            p.add_argument("--step", type=float, default=2.0, help="grid step (dB)")

    sp = sub.add_parser("sweep-power", help="outage versus transmit power")
    add_common(sp)

    pp = sub.add_parser("sweep-ports", help="outage versus port count")
    add_common(pp, with_grid=False)
    pp.add_argument("--ports", default="10,20,30,40,50",
                    help="comma-separated strictly increasing port counts")

    cp = sub.add_parser("compare-phases", help="optimal versus random RIS phases")
    add_common(cp)
    cp.add_argument("--random-seeds", type=int, default=1,
                    help="number of random phase configurations to average")

    cfgp = sub.add_parser("config", help="configuration utilities")
    cfgsub = cfgp.add_subparsers(dest="config_command", required=True)
    cfgsub.add_parser("print-defaults", help="emit a commented config template")

    # maintenance command: regenerates the golden oracle tables
    orp = sub.add_parser("oracle")
    orsub = orp.add_subparsers(dest="oracle_command", required=True)
    gen = orsub.add_parser("gen")
    gen.add_argument("--out", default="oracle", help="output directory for the CSV tables")

    args = parser.parse_args(argv)
    try:
        if args.command == "config":
            sys.stdout.write(config_template())
            return 0
        if args.command == "oracle":
            from fasris import oraclegen

            oraclegen.generate_all(args.out)
            return 0
        if args.command == "sweep-power":
            res = sweep_power(args.config, args.p_min, args.p_max, args.step,
                              args.out, args.format, args.seed)
        elif args.command == "sweep-ports":
            ports = [int(p) for p in args.ports.replace(",", " ").split()]
            res = sweep_ports(args.config, ports, args.out, args.format, args.seed)
        else:
            res = compare_phases(args.config, args.out, args.format, args.random_seeds,
                                 args.p_min, args.p_max, args.step, args.seed)
        return 1 if res.numeric_errors else 0
    except (OSError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FasrisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
