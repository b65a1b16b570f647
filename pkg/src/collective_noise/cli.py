"""Batch front end: scans over ``(N, beta)`` grids written as CSV or JSON.

Every row is ``(command, N, beta, metric, value, ref)``.  ``ref`` is a short
tag naming the statement the metric measures; the README lists them all.
Exit status is 0 on success, 1 when an invariant checked by the command
fails and 2 on configuration or capacity errors.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
import csv
import io
import json
import math
import os
import sys

import numpy as np

from .errors import CapacityError, CollectiveNoiseError, DomainError

SEED_ENV = "COLLECTIVE_NOISE_SEED"
DEFAULT_SEED = 20240611
COMMANDS = ("gap-scan", "clsi-witness", "metastable", "primitivity", "markov",
            "expander", "verify-all")
FIELDS = ("command", "N", "beta", "metric", "value", "ref")

# command -> (smallest N, largest N); dense commands are further capped by --dense-limit
CAPACITY = {
    "gap-scan": (1, 128),
    "clsi-witness": (3, 512),
    "metastable": (3, 512),
    "primitivity": (2, 6),
    "markov": (2, 1024),
    "expander": (2, 64),
    "verify-all": (1, 5),
}

METRIC_REFS = {
    "gap": "gap.value",
    "kernel_dim": "kernel.multiplicity-free",
    "witness_quotient": "gap.upper-bound",
    "gap_times_N": "gap.scaling",
    "spectral_difference": "unigap.delta",
    "witness_dirichlet": "witness.dirichlet",
    "witness_bound": "witness.lemma-bound",
    "witness_ratio": "witness.lemma-bound",
    "witness_holds": "witness.lemma-bound",
    "min_rate": "metastable.rate",
    "rate_times_N": "metastable.rate",
    "min_gamma": "metastable.gamma",
    "gamma_bound": "metastable.gamma",
    "kernel_dim_random": "primitivity.generic",
    "kernel_dim_constant": "primitivity.constant",
    "lie_oracle_agrees": "primitivity.lie-closure",
    "vandermonde_holds": "primitivity.vandermonde",
    "mixing_steps": "markov.mixing",
    "markov_gap": "markov.gap",
    "lsi_constant": "markov.lsi",
    "detailed_balance_defect": "markov.detailed-balance",
    "lower_transition": "markov.lower-transition",
    "expander_gap": "expander.gap",
    "composite_excess": "expander.composite",
    "spectrum_deviation": "oracle.spectrum",
    "kernel_full": "oracle.kernel-full",
    "phi_deviation": "oracle.markov",
    "fourier_deviation": "oracle.fourier",
    "block_action_deviation": "oracle.block-action",
    "stationarity_defect": "oracle.kms",
}


@dataclass
class ExperimentConfig:
    command: str
    n_min: int
    n_max: int
    betas: list = field(default_factory=lambda: [1.0])
    gammas: list = field(default_factory=list)
    seed: int = DEFAULT_SEED
    out: str = "-"
    fmt: str = "csv"
    jobs: int = 1
    dense_limit: int = 4
    beta_given: bool = True

    def validate(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.fmt not in ("csv", "json"):
            raise DomainError("--format must be csv or json")
        if self.n_min > self.n_max:
            raise DomainError(f"empty N range {self.n_min}..{self.n_max}")
        lo, hi = CAPACITY[self.command]
        if self.command in ("primitivity", "verify-all"):
            hi = min(hi, self.dense_limit)
        if self.n_min < lo or self.n_max > hi:
            raise CapacityError(f"{self.command} supports {lo} <= N <= {hi} "
                                f"(got {self.n_min}..{self.n_max}); raise --dense-limit "
                                f"or narrow the range")
        if not self.betas:
            raise DomainError("need at least one --beta")
        if any(not math.isfinite(b) or b <= 0 for b in self.betas):
            raise DomainError("every beta must be positive and finite")
        if any(g < 1 or int(g) != g for g in self.gammas):
            raise DomainError("gamma values must be positive integers")
        if self.jobs < 1:
            raise DomainError("--jobs must be at least 1")
        return self


# --- parsing -------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="collective-noise", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file with any of the options below; flags win")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--beta", type=float, action="append", help="repeatable")
    p.add_argument("--gamma", type=int, action="append", help="repeatable (gap-scan)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path, '-' for stdout")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"))
    p.add_argument("--jobs", type=int)
    p.add_argument("--dense-limit", type=int)
    return p


_CONFIG_KEYS = {"command": "command", "n_min": "n_min", "n_max": "n_max", "beta": "betas",
                "betas": "betas", "gamma": "gammas", "gammas": "gammas", "seed": "seed",
                "out": "out", "format": "fmt", "fmt": "fmt", "jobs": "jobs",
                "dense_limit": "dense_limit"}


def _read_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise DomainError("config file must hold a JSON object")
    out = {}
    for key, val in raw.items():
        k = key.replace("-", "_")
        if k not in _CONFIG_KEYS:
            raise DomainError(f"unknown config key {key!r}")
        name = _CONFIG_KEYS[k]
        if name in ("betas", "gammas") and not isinstance(val, list):
            val = [val]
        out[name] = val
    return out


def config_from_args(argv=None, env=None):
    env = os.environ if env is None else env
    args = build_parser().parse_args(argv)
    vals = _read_config(args.config) if args.config else {}
    flags = {"command": args.command, "n_min": args.n_min, "n_max": args.n_max,
             "betas": args.beta, "gammas": args.gamma, "seed": args.seed, "out": args.out,
             "fmt": args.fmt, "jobs": args.jobs, "dense_limit": args.dense_limit}
    vals.update({k: v for k, v in flags.items() if v is not None})
    if "command" not in vals:
        raise DomainError("--command is required")
    if "seed" not in vals:
        raw = env.get(SEED_ENV)
        if raw is not None:
            try:
                vals["seed"] = int(raw)
            except ValueError as exc:
                raise DomainError(f"{SEED_ENV}={raw!r} is not an integer") from exc
    cmd = vals["command"]
    lo, _ = CAPACITY.get(cmd, (1, 1))
    vals.setdefault("n_min", max(lo, 2 if cmd != "verify-all" else 1))
    vals.setdefault("n_max", vals["n_min"])
    vals["beta_given"] = "betas" in vals
    vals.setdefault("betas", [1.0])
    cfg = ExperimentConfig(**{k: v for k, v in vals.items()})
    cfg = replace(cfg, betas=[float(b) for b in cfg.betas], gammas=[int(g) for g in cfg.gammas],
                  n_min=int(cfg.n_min), n_max=int(cfg.n_max), seed=int(cfg.seed),
                  jobs=int(cfg.jobs), dense_limit=int(cfg.dense_limit))
    return cfg.validate()


# --- jobs ----------------------------------------------------------------

def _job_seed(seed, N, beta):
    """Per-job seed, independent of worker count and scheduling."""
    key = int(round(beta * 1e6))
    return int(np.random.SeedSequence([seed, N, key]).generate_state(1)[0])


def _row(cmd, N, beta, metric, value, ref_metric=None):
    return (cmd, int(N), float(beta), metric, value, METRIC_REFS[ref_metric or metric])


def _gap_scan(cfg, N, beta):
    from .spectral import min_spectral_difference, spectral_gap
    r = spectral_gap(N, beta)
    rows = [_row(cfg.command, N, beta, "gap", r.gap),
            _row(cfg.command, N, beta, "kernel_dim", r.kernel_dim),
            _row(cfg.command, N, beta, "witness_quotient", r.witness_quotient),
            _row(cfg.command, N, beta, "gap_times_N", r.gap * N)]
    for g in cfg.gammas:
        rows.append(_row(cfg.command, N, beta, f"spectral_difference[gamma={g}]",
                         min_spectral_difference(N, g).delta, "spectral_difference"))
    fails = []
    if r.kernel_dim != N // 2 + 1:
        fails.append(f"N={N}: kernel {r.kernel_dim} != floor(N/2)+1")
    if N >= 3 and r.witness_quotient < r.gap * (1 - 1e-12):
        fails.append(f"N={N} beta={beta}: witness quotient below gap")
    return rows, fails


def _clsi_witness(cfg, N, beta):
    from .spectral import gap_upper_bound_witness
    w = gap_upper_bound_witness(N, beta)
    ratio = w.dirichlet / w.lemma_bound
    holds = ratio >= 1 - 1e-10
    rows = [_row(cfg.command, N, beta, "witness_dirichlet", w.dirichlet),
            _row(cfg.command, N, beta, "witness_bound", w.lemma_bound),
            _row(cfg.command, N, beta, "witness_ratio", ratio),
            _row(cfg.command, N, beta, "witness_holds", int(holds)),
            _row(cfg.command, N, beta, "witness_quotient", w.quotient)]
    fails = [] if holds else [f"N={N} beta={beta}: <xi,xi>_L / bound = {ratio:.4g} < 1"]
    return rows, fails


def _metastable(cfg, N, beta):
    from .metastable import min_decay_mode
    r = min_decay_mode(N - 2, N, beta)
    rows = [_row(cfg.command, N, beta, "min_rate", r.min_rate),
            _row(cfg.command, N, beta, "rate_times_N", r.min_rate * N),
            _row(cfg.command, N, beta, "min_gamma", r.min_gamma),
            _row(cfg.command, N, beta, "gamma_bound", r.bound)]
    fails = []
    if r.min_rate < -1e-12:
        fails.append(f"N={N}: negative decay rate")
    if not cfg.beta_given:
        # footnote regime beta = 2 log(2N): both bounds are invariants
        if r.min_rate > 1 / N + 1e-9:
            fails.append(f"N={N}: min rate {r.min_rate:.4g} > 1/N")
        if not r.bound_holds:
            fails.append(f"N={N}: min |gamma| {r.min_gamma:.4g} > bound {r.bound:.4g}")
    return rows, fails


def _primitivity(cfg, N, beta):
    from . import primitivity as P
    from .lindblad_core import GibbsState
    from .rep_su2 import schur_weyl_decomposition, tensor_generator
    d = GibbsState(N, beta).matrix()
    a = tensor_generator(N, "a")
    gens = [a, a.conj().T]
    th = P.random_angles(N, _job_seed(cfg.seed, N, beta))
    k_rand = P.fixed_point_dim(P.combined_lindbladian(th, beta), d)
    O = P.collective_generator(th)
    prim, comm = P.lie_primitivity_oracle(gens + [O, O.conj().T])
    thc = np.full(N, 0.7)
    k_const = P.fixed_point_dim(P.combined_lindbladian(thc, beta), d)
    Oc = P.collective_generator(thc)
    prim_c, comm_c = P.lie_primitivity_oracle(gens + [Oc, Oc.conj().T])
    agrees = prim == (k_rand == 1) and comm == k_rand and not prim_c and comm_c == k_const
    vm = P.vandermonde_check(th, np.zeros(N))
    smult = sum(k * k for _, k in schur_weyl_decomposition(N).components)
    rows = [_row(cfg.command, N, beta, "kernel_dim_random", k_rand),
            _row(cfg.command, N, beta, "kernel_dim_constant", k_const),
            _row(cfg.command, N, beta, "lie_oracle_agrees", int(agrees)),
            _row(cfg.command, N, beta, "vandermonde_holds",
                 math.nan if vm.holds is None else int(vm.holds))]
    fails = []
    if vm.holds and k_rand != 1:
        fails.append(f"N={N}: Vandermonde condition holds but kernel is {k_rand}")
    if k_const != smult:
        fails.append(f"N={N}: constant-angle kernel {k_const} != {smult}")
    if not agrees:
        fails.append(f"N={N}: Lie-closure oracle disagrees")
    return rows, fails


def _markov(cfg, N, beta):
    from .markov_chain import gaussian_comparison, lower_transition_constant, mixing_time, phi_matrix
    k = phi_matrix(N, beta)
    mix = mixing_time(k)
    lsi = gaussian_comparison(N, beta, 200, _job_seed(cfg.seed, N, beta))
    db = k.detailed_balance_defect()
    rows = [_row(cfg.command, N, beta, "mixing_steps", mix.steps),
            _row(cfg.command, N, beta, "markov_gap", mix.spectral_gap),
            _row(cfg.command, N, beta, "lsi_constant", lsi.K),
            _row(cfg.command, N, beta, "detailed_balance_defect", db),
            _row(cfg.command, N, beta, "lower_transition", lower_transition_constant(k)[1])]
    fails = [] if db <= 1e-10 else [f"N={N}: detailed balance defect {db:.3e}"]
    return rows, fails


def _expander(cfg, N, beta):
    from . import reduction as R
    seed = _job_seed(cfg.seed, N, beta)
    es = R.expander_set(N, 3, seed)
    theta = R.contraction_coefficient(es)
    rng = np.random.default_rng(seed)
    excess = -math.inf
    for d in (es.m + 1, 2 * es.m + 1, 3 * es.m + 2):
        eta = rng.uniform(0.2, 0.95)
        mu = R.plateau_measure(d, es.m, eta, rng)
        excess = max(excess, R.composite_channel_norm(es, mu) - R.composite_bound(theta, eta))
    rows = [_row(cfg.command, N, beta, "expander_gap", 1 - theta),
            _row(cfg.command, N, beta, "composite_excess", excess)]
    fails = [] if excess <= 1e-8 else [f"dim={N}: composite bound exceeded by {excess:.3e}"]
    return rows, fails


def _verify_all(cfg, N, beta):
    from . import acceptance as A
    from . import primitivity as P
    from . import spectral as S
    from .lindblad_core import (BlockOperator, GibbsState, all_blocks, lindblad_dense,
                                lindblad_multiplicity_free)
    from .markov_chain import phi_matrix
    from .rep_su2 import schur_weyl_decomposition
    g = GibbsState(N, beta)
    d = g.matrix()
    L = lindblad_dense(N, beta, dense_limit=max(cfg.dense_limit, 1))
    dense = S.dense_kms_spectrum(L, d)
    blocks = S.expanded_spectrum(N, beta)
    spec_dev = float(np.max(np.abs(dense - blocks) / np.maximum(1, np.abs(dense))))
    kfull = P.fixed_point_dim(L, d)
    smult = sum(k * k for _, k in schur_weyl_decomposition(N).components)
    phi_dev = float(np.abs(phi_matrix(N, beta).P - A.phi_oracle(N, beta)).max())
    four_dev = A.fourier_deviation(N)
    # block generators against the multiplicity-free dense generator
    Lmf = lindblad_multiplicity_free(N, beta)
    rng = np.random.default_rng(_job_seed(cfg.seed, N, beta))
    act = 0.0
    for blk in all_blocks(N):
        c = rng.normal(size=blk.size)
        x = BlockOperator(blk, c).to_matrix(N)
        y = S.superoperator_from_block(blk, beta).apply(c)
        act = max(act, float(np.abs(Lmf.apply(x) - BlockOperator(blk, y).to_matrix(N)).max()))
    # stationarity of d under the predual and KMS symmetry of L
    stat = float(np.abs(L.predual_matrix() @ d.reshape(-1)).max())
    S.kms_symmetrize(L, d)
    rows = [_row(cfg.command, N, beta, "spectrum_deviation", spec_dev),
            _row(cfg.command, N, beta, "kernel_full", kfull),
            _row(cfg.command, N, beta, "phi_deviation", phi_dev),
            _row(cfg.command, N, beta, "fourier_deviation", four_dev),
            _row(cfg.command, N, beta, "block_action_deviation", act),
            _row(cfg.command, N, beta, "stationarity_defect", stat)]
    fails = [f"N={N} beta={beta}: {name} {val:.3e}" for name, val, tol in
             (("spectrum deviation", spec_dev, 1e-8), ("Phi deviation", phi_dev, 1e-10),
              ("Fourier deviation", four_dev, 1e-10), ("block action", act, 1e-10),
              ("stationarity", stat, 1e-10)) if not val <= tol]
    if kfull != smult:
        fails.append(f"N={N}: full kernel {kfull} != {smult}")
    return rows, fails


HANDLERS = {
    "gap-scan": _gap_scan,
    "clsi-witness": _clsi_witness,
    "metastable": _metastable,
    "primitivity": _primitivity,
    "markov": _markov,
    "expander": _expander,
    "verify-all": _verify_all,
}


def _run_job(args):
    cfg, N, beta = args
    return N, beta, HANDLERS[cfg.command](cfg, N, beta)


def jobs_for(cfg):
    if cfg.command == "metastable" and not cfg.beta_given:
        return [(N, 2 * math.log(2 * N)) for N in range(cfg.n_min, cfg.n_max + 1)]
    if cfg.command == "expander":
        return [(N, cfg.betas[0]) for N in range(cfg.n_min, cfg.n_max + 1)]
    return [(N, b) for N in range(cfg.n_min, cfg.n_max + 1) for b in sorted(set(cfg.betas))]


# --- output --------------------------------------------------------------

def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return format(v, ".17g") if math.isfinite(v) else "nan"


def _json_value(v):
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, (float, np.floating)) and not math.isfinite(v):
        return "null"
    return format_value(v)


def render(rows, fmt):
    """Report text; rows must all be ``FIELDS``-tuples."""
    for r in rows:
        if len(r) != len(FIELDS):
            raise DomainError("rows must be homogeneous (command, N, beta, metric, value, ref)")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(FIELDS)
        for r in rows:
            w.writerow([r[0], r[1], format_value(r[2]), r[3], format_value(r[4]), r[5]])
        return buf.getvalue()
    if fmt == "json":
        objs = ["{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in zip(FIELDS, r)) + "}"
                for r in rows]
        return "[" + ",\n ".join(objs) + "]\n"
    raise DomainError(f"unknown format {fmt!r}")


def emit_report(rows, fmt, path):
    """Write rows as RFC-4180 CSV (header first) or a JSON array, UTF-8."""
    text = render(rows, fmt)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def parse_report(text, fmt):
    """Inverse of ``render``: rows with numeric fields restored."""
    if fmt == "json":
        return [tuple(math.nan if o[k] is None and k == "value" else o[k] for k in FIELDS)
                for o in json.loads(text)]
    reader = csv.reader(io.StringIO(text))
    next(reader)
    out = []
    for c, N, b, m, v, ref in reader:
        val = int(v) if v.lstrip("-").isdigit() else float(v)
        out.append((c, int(N), float(b), m, val, ref))
    return out


# --- orchestration -------------------------------------------------------

def run(cfg):
    """Run ``cfg``; returns ``(rows, failures)``.

    Rows are sorted by ``N`` then ``beta``.  With an output file, completed
    jobs are appended to ``<out>.partial`` as they finish and the checkpoint
    is removed once the report is written.
    """
    jobs = jobs_for(cfg)
    partial = None if cfg.out in (None, "-") else cfg.out + ".partial"
    if partial:
        try:
            open(partial, "w", encoding="utf-8").close()
        except OSError as exc:
            raise DomainError(f"output path not writable: {exc}") from exc
    results = []

    def record(res):
        results.append(res)
        if partial:
            with open(partial, "a", encoding="utf-8") as fh:
                fh.write(render(res[2][0], "json"))

    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            for res in ex.map(_run_job, [(cfg, N, b) for N, b in jobs]):
                record(res)
    else:
        for N, b in jobs:
            record(_run_job((cfg, N, b)))
    results.sort(key=lambda r: (r[0], r[1]))
    rows = [row for _, _, (rs, _) in results for row in rs]
    fails = [f for _, _, (_, fs) in results for f in fs]
    emit_report(rows, cfg.fmt, cfg.out)
    if partial and os.path.exists(partial):
        os.remove(partial)
    return rows, fails


def main(argv=None):
    try:
        cfg = config_from_args(argv)
    except (CollectiveNoiseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        _, fails = run(cfg)
    except (CollectiveNoiseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for f in fails:
        print(f"invariant failed: {f}", file=sys.stderr)
    return 1 if fails else 0


if __name__ == "__main__":
    sys.exit(main())
