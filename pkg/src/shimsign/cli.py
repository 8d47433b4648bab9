"""Command-line driver.

    shimsign gen       build coefficient caches
    shimsign signs     prime signs of a(t p^2)/chi(p), criterion check, scatter data
    shimsign satotate  restricted Sato-Tate statistics and error checkpoints
    shimsign density   progression sign densities, Delange sums, d-independence
    shimsign fit       power-law fit of emitted error checkpoints
    shimsign report    all of the above plus desk-scale assertions

Exit codes: 0 success, 2 configuration error, 3 assertion failure, 4 missing cache.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import check_delta_grid, check_unit_residue
from .arith import kronecker
from .characters import character_group, principal
from .cyclotomic import exact_div, exact_sign
from .density import (
    SignFunction,
    d_independence_check,
    delange_partial_sums,
    identity_1q_diagnostic,
    progression_sign_counts,
    multiplicativity_check,
    progression_units,
    scatter_rows,
)
from .halfint import format_value, load_form, parse_value
from .qseries import CacheError, cache_path, delta, read_cache, write_cache
from .satotate import (
    Restriction,
    error_checkpoints,
    error_term_fit,
    prime_sign_densities,
    restricted_sample,
    sign_criterion_threshold,
)
from .shimura import LiftedForm, invert_lift, lift, normalized_eigenvalues

EXIT_OK, EXIT_CONFIG, EXIT_ASSERT, EXIT_NO_CACHE = 0, 2, 3, 4

PRESET = "delta-preimage"
# built-in preset: Delta as the lift of a level-4, weight 13/2 form with t = 1
PRESET_LEVEL, PRESET_K, PRESET_T = 4, 6, 1


class ConfigError(ValueError):
    pass


class MissingCache(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    form: str = PRESET
    t: int = PRESET_T
    q: int = 5
    d: list = field(default_factory=list)
    xmax: int | None = None
    T: int | None = None
    delta_grid: list = field(default_factory=lambda: [0.1, 0.05, 0.02, 0.01])
    checkpoint_start: int = 1000
    interval: list = field(default_factory=lambda: [0.0, 1.0])
    seed: int = 0
    out: str = "shimsign-out"
    cache: str = ".shimsign-cache"

    def validate(self) -> ExperimentConfig:
        try:
            if self.q < 1:
                raise ValueError("q must be >= 1")
            self.d = [int(x) for x in self.d] or progression_units(self.q)
            for d in self.d:
                check_unit_residue(d, self.q)
            if self.xmax is None:
                self.xmax = self.T or 100_000
            if self.xmax < 1000:
                raise ValueError("xmax must be >= 1000")
            if self.T is None:
                self.T = self.xmax
            if self.T < self.xmax:
                raise ValueError(f"T={self.T} must cover xmax={self.xmax}")
            self.delta_grid = check_delta_grid(self.delta_grid)
            a, b = (float(x) for x in self.interval)
            if not -1 <= a <= b <= 1:
                raise ValueError(f"interval [{a}, {b}] must lie in [-1, 1]")
            self.interval = [a, b]
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(dataclasses.asdict(self), sort_keys=True).encode()).hexdigest()


# -- caches ---------------------------------------------------------------------


def _form_id(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _lift_cache_path(cfg: ExperimentConfig) -> Path:
    return Path(cfg.cache) / f"lift-{_form_id(cfg.form)}-t{cfg.t}.tbl"


def _write_table(path: Path, values, meta: dict) -> None:
    body = [format_value(v) for v in values]
    digest = hashlib.sha256(("\n".join(body) + "\n").encode()).hexdigest()
    header = ["# shimsign-table v1"] + [f"# {k}: {json.dumps(v)}" for k, v in sorted(meta.items())]
    header.append(f"# sha256: {digest}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(header + body) + "\n")


def _read_table(path: Path):
    lines = path.read_text().splitlines()
    if not lines or lines[0] != "# shimsign-table v1":
        raise CacheError(f"{path}: not a table cache")
    meta = {}
    body = []
    for line in lines[1:]:
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = value if key == "sha256" else json.loads(value)
        else:
            body.append(line)
    if hashlib.sha256(("\n".join(body) + "\n").encode()).hexdigest() != meta.get("sha256"):
        raise CacheError(f"{path}: checksum mismatch")
    return [parse_value(x) for x in body], meta


def cmd_gen(cfg: ExperimentConfig) -> str:
    """Build (or verify) the cache needed for ``cfg``; returns a status line."""
    Path(cfg.cache).mkdir(parents=True, exist_ok=True)
    if cfg.form == PRESET:
        path = cache_path(cfg.cache, "delta", {})
        if path.exists():
            try:
                series, meta = read_cache(path)
                if meta["truncation"] + 1 >= cfg.T:
                    return f"cache valid: {path} (tau up to {meta['truncation'] + 1})"
            except CacheError:
                pass
        write_cache(path, delta(cfg.T - 1), "delta", {})
        return f"wrote {path} (tau up to {cfg.T})"
    path = _lift_cache_path(cfg)
    if path.exists():
        try:
            values, meta = _read_table(path)
            if meta["T"] >= cfg.T:
                return f"cache valid: {path}"
        except CacheError:
            pass
    form = load_form(cfg.form)
    M = min(cfg.T, math.isqrt(form.truncation // cfg.t))
    F = lift(form, cfg.t, M)
    _write_table(path, F.coeffs[1:], {"T": M, "t": cfg.t, "weight": F.weight, "level": F.level})
    return f"wrote {path} (A_t(n) for n <= {M})"


@dataclass
class Experiment:
    lifted: LiftedForm
    values: list  # values[n] = a(t n^2)
    chi: object
    N: int
    k: int
    t: int

    @property
    def X(self) -> int:
        return len(self.values) - 1


def load_experiment(cfg: ExperimentConfig) -> Experiment:
    if cfg.form == PRESET:
        path = cache_path(cfg.cache, "delta", {})
        if not path.exists():
            raise MissingCache(f"no tau cache in {cfg.cache}; run `shimsign gen --T {cfg.T} --cache {cfg.cache}`")
        series, meta = read_cache(path)
        if meta["truncation"] + 1 < cfg.xmax:
            raise MissingCache(
                f"tau cache covers n <= {meta['truncation'] + 1} < xmax={cfg.xmax}; "
                f"run `shimsign gen --T {cfg.xmax} --cache {cfg.cache}`"
            )
        chi = principal(PRESET_LEVEL)
        tau = series.table()[: cfg.xmax + 1]
        A = LiftedForm(12, PRESET_LEVEL // 2, chi, tuple(tau), 1, chi)
        values = invert_lift(A, PRESET_T, chi, PRESET_LEVEL, PRESET_K)
        return Experiment(A, values, chi, PRESET_LEVEL, PRESET_K, PRESET_T)
    if not Path(cfg.form).exists():
        raise ConfigError(f"form file {cfg.form} does not exist")
    form = load_form(cfg.form)
    path = _lift_cache_path(cfg)
    if not path.exists():
        raise MissingCache(f"no lift cache for {cfg.form}; run `shimsign gen --form {cfg.form} --t {cfg.t}`")
    coeffs, meta = _read_table(path)
    A = LiftedForm(2 * form.k, form.level // 2, form.character * form.character, tuple([0] + coeffs), coeffs[0], form.character)
    values = invert_lift(A, cfg.t, form.character, form.level, form.k)
    return Experiment(A, values, form.character, form.level, form.k, cfg.t)


# -- output ----------------------------------------------------------------------


def _metadata(cfg: ExperimentConfig) -> list[str]:
    return [
        f"# tool: shimsign {__version__}",
        f"# config_sha256: {cfg.digest()}",
        f"# config: {json.dumps(dataclasses.asdict(cfg), sort_keys=True)}",
    ]


def _fmt(x):
    if isinstance(x, float):
        return repr(round(x, 12))
    return x


def write_csv(path: Path, header, rows, cfg: ExperimentConfig) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    buf.write("\n".join(_metadata(cfg)) + "\n")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())


def write_json(path: Path, payload: dict, cfg: ExperimentConfig) -> None:
    payload = dict(payload)
    payload["_meta"] = {"tool": f"shimsign {__version__}", "config_sha256": cfg.digest(), "config": dataclasses.asdict(cfg)}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return str(x)


def read_csv_rows(path: Path) -> list[dict]:
    with open(path) as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


# -- commands ------------------------------------------------------------------------


def _restrictions(cfg: ExperimentConfig) -> list[Restriction]:
    if cfg.q == 1:
        return [Restriction()]
    return [Restriction.progression(d, cfg.q) for d in cfg.d]


def cmd_signs(cfg: ExperimentConfig) -> dict:
    exp = load_experiment(cfg)
    out = Path(cfg.out)
    B = normalized_eigenvalues(exp.lifted, cfg.xmax, exp.chi)
    chi1 = (-1) ** exp.k * exp.N**2 * exp.t
    rows, signs, disagreements = [], {}, []
    for p, b in zip(B.primes.tolist(), B.values.tolist()):
        s = exact_sign(exact_div(exp.values[p], exp.chi(p)))
        signs[p] = s
        c1 = kronecker(chi1, p)
        threshold = sign_criterion_threshold(p, c1)
        ratio = B.exact[p]
        # exact comparison of B(p) against chi_1(p)/(2 sqrt p), scaled by 2 p^((2k-1)/2) a(t)
        diff = ratio - c1 * p ** (exp.k - 1)
        crit = exact_sign(diff) * exact_sign(exp.lifted.a_t)
        if crit != s:
            disagreements.append(p)
        rows.append((p, s, b, threshold, crit, int(crit == s)))
    write_csv(out / "signs.csv", ["p", "sign", "B", "threshold", "criterion_sign", "agree"], rows, cfg)
    reports = [prime_sign_densities(signs, d, cfg.q, cfg.xmax) for d in cfg.d]
    write_csv(
        out / "prime_signs.csv",
        ["q", "d", "x", "pos", "neg", "zero", "class_count", "prime_count", "pos_ratio", "neg_ratio", "zero_ratio", "predicted_vs_all"],
        [(r.q, r.d, r.x, r.positive, r.negative, r.zero, r.class_count, r.prime_count, *r.ratios(), r.predicted) for r in reports],
        cfg,
    )
    write_csv(
        out / "scatter.csv",
        ["n", "index", "re", "im", "chi_label"],
        scatter_rows(exp.values, exp.t, exp.chi, exp.N, cfg.xmax),
        cfg,
    )
    return {"disagreements": disagreements, "prime_sign_reports": reports, "signs": signs}


def cmd_satotate(cfg: ExperimentConfig) -> dict:
    exp = load_experiment(cfg)
    out = Path(cfg.out)
    B = normalized_eigenvalues(exp.lifted, cfg.xmax, exp.chi)
    a, b = cfg.interval
    rows, hist, checkpoints, stats = [], [], [], {}
    for r in _restrictions(cfg):
        s = restricted_sample(B, r, cfg.xmax, intervals=[(a, b)])
        full = restricted_sample(B, r, cfg.xmax)
        stats[r.label()] = (s, full)
        rows.append((r.label(), cfg.xmax, s.n_sample, s.ks_distance, f"[{a},{b}]", s.share(a, b), s.interval_table[0][3]))
        for lo, hi, emp, pred in full.interval_table:
            rows.append((r.label(), cfg.xmax, full.n_sample, full.ks_distance, f"[{lo},{hi}]", emp, pred))
            hist.append((r.label(), lo, hi, round(emp * full.n_sample), pred * full.n_sample))
        for x, e in error_checkpoints(B, r, a, b, cfg.xmax, cfg.checkpoint_start):
            checkpoints.append((r.label(), x, e))
    write_csv(out / "satotate.csv", ["restriction", "x", "n_sample", "ks", "interval", "empirical", "predicted"], rows, cfg)
    write_csv(out / "histogram.csv", ["restriction", "lo", "hi", "count", "expected"], hist, cfg)
    write_csv(out / "checkpoints.csv", ["restriction", "x", "E"], checkpoints, cfg)
    return {"stats": stats}


def _sign_function(exp: Experiment, X: int) -> SignFunction:
    return SignFunction.from_values(exp.values[: X + 1], exp.N, exp.chi)


def cmd_density(cfg: ExperimentConfig) -> dict:
    exp = load_experiment(cfg)
    out = Path(cfg.out)
    X = min(cfg.xmax, exp.X)
    f = _sign_function(exp, X)
    reports = [progression_sign_counts(f, cfg.q, d, X, cfg.delta_grid) for d in cfg.d]
    write_csv(
        out / "density.csv",
        ["q", "d", "X", "pos", "neg", "zero", "nonzero", "pos_ratio", "neg_ratio", "radius"],
        [(r.q, r.d, r.X, r.positive, r.negative, r.zero, r.nonzero, r.pos_ratio, r.neg_ratio, r.radius) for r in reports],
        cfg,
    )
    cps = sorted({x for x in (1000, 10_000, 100_000, 1_000_000) if x <= X} | {X})
    delange = []
    for eps in character_group(cfg.q):
        for pt in delange_partial_sums(f, eps, cps):
            delange.append((eps.label(), pt.x, pt.value))
    write_csv(out / "delange.csv", ["character", "x", "value"], delange, cfg)
    dd_rows = [(r.d, e.delta, e.estimate, e.tail_bound, e.corrected) for r in reports for e in r.dd_estimates]
    write_csv(out / "dedekind_dirichlet.csv", ["d", "delta", "estimate", "tail_bound", "corrected"], dd_rows, cfg)
    indep = d_independence_check(f, cfg.q, X)
    identity = None
    if cfg.q == exp.N or math.gcd(cfg.q, exp.N) == 1:
        identity = [dataclasses.asdict(identity_1q_diagnostic(f, cfg.q, d, cfg.delta_grid[-1], X)) for d in cfg.d]
    summary = {
        "d_independence": {"max_deviation": indep["max_deviation"], "densities": {str(k): v for k, v in indep["densities"].items()}},
        "identity_1q": identity,
        "zero_counts": {str(r.d): r.zero for r in reports},
    }
    write_json(out / "density.json", summary, cfg)
    return {"reports": reports, "delange": delange, "independence": indep, "f": f}


def cmd_fit(cfg: ExperimentConfig, source: Path | None = None) -> dict:
    source = source or Path(cfg.out) / "checkpoints.csv"
    if not source.exists():
        raise MissingCache(f"{source} not found; run `shimsign satotate` first")
    by_restriction: dict[str, list] = {}
    for row in read_csv_rows(source):
        by_restriction.setdefault(row["restriction"], []).append((int(row["x"]), float(row["E"])))
    fits = []
    for label, cps in sorted(by_restriction.items()):
        try:
            fit = error_term_fit(cps)
            fits.append({"restriction": label, "C": fit.C, "alpha": fit.alpha, "residual": fit.residual, "checkpoints": cps})
        except ValueError as exc:
            fits.append({"restriction": label, "C": None, "alpha": None, "residual": None, "error": str(exc), "checkpoints": cps})
    write_json(Path(cfg.out) / "fit.json", {"fits": fits}, cfg)
    return {"fits": fits}


def cmd_report(cfg: ExperimentConfig) -> dict:
    """Run everything and check desk-scale predictions; failures are collected, not raised."""
    signs = cmd_signs(cfg)
    st = cmd_satotate(cfg)
    dens = cmd_density(cfg)
    cmd_fit(cfg)
    checks = []

    def check(name, ok, value):
        checks.append({"name": name, "pass": bool(ok), "value": value})

    check("sign criterion agreement", not signs["disagreements"], signs["disagreements"][:20])
    for r in signs["prime_sign_reports"]:
        pos, _, _ = r.ratios()
        check(f"prime sign ratio d={r.d} q={r.q}", abs(pos - 0.5) <= 0.05, pos)
    for label, (s, full) in st["stats"].items():
        a, b = cfg.interval
        check(f"Sato-Tate share [{a},{b}] {label}", abs(s.share(a, b) - s.interval_table[0][3]) <= 0.05, s.share(a, b))
        check(f"Sato-Tate KS {label}", full.ks_distance <= 0.05, full.ks_distance)
    for r in dens["reports"]:
        check(f"pos/nonzero d={r.d} q={r.q}", 0.45 <= r.pos_ratio <= 0.55, r.pos_ratio)
    for label, x, value in dens["delange"]:
        if x == max(p[1] for p in dens["delange"]):
            check(f"Delange {label} x={x}", value <= 0.05, value)
    mult = multiplicativity_check(dens["f"], 1000, seed=cfg.seed)
    check("f multiplicative", mult.ok, mult.violations[:20])
    check("d-independence", dens["independence"]["max_deviation"] <= 0.05, dens["independence"]["max_deviation"])
    failed = [c for c in checks if not c["pass"]]
    write_json(Path(cfg.out) / "report.json", {"checks": checks, "failed": len(failed)}, cfg)
    if failed:
        write_json(Path(cfg.out) / "failure.json", {"failed": failed}, cfg)
    return {"checks": checks, "failed": failed}


# -- argument handling ----------------------------------------------------------------


def _parse_list(text: str, cast):
    return [cast(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    common.add_argument("--form", help=f"'{PRESET}' or a form file path")
    common.add_argument("--t", type=int, help="squarefree t of the square class t n^2")
    common.add_argument("--q", type=int, help="progression modulus")
    common.add_argument("--d", help="comma-separated residues (default: all units mod q)")
    common.add_argument("--xmax", type=int, help="largest n and p examined (>= 1000)")
    common.add_argument("--T", type=int, dest="T", help="coefficients to cache (default: xmax)")
    common.add_argument("--delta-grid", dest="delta_grid", help="comma-separated, positive, decreasing")
    common.add_argument("--interval", help="a,b for interval shares and error checkpoints")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--out", help="output directory")
    common.add_argument("--cache", help="cache directory")

    parser = argparse.ArgumentParser(
        prog="shimsign", description="Sign experiments for coefficients of half-integral weight forms."
    )
    parser.add_argument("--version", action="version", version=f"shimsign {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("gen", "build coefficient caches"),
        ("signs", "prime signs and the B_t(p) criterion"),
        ("satotate", "restricted Sato-Tate statistics"),
        ("density", "progression sign densities"),
        ("fit", "fit error checkpoints"),
        ("report", "run everything and check predictions"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "fit":
            p.add_argument("--input", help="checkpoints CSV (default: <out>/checkpoints.csv)")
    return parser


def config_from_args(args) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(data) - {f.name for f in dataclasses.fields(ExperimentConfig)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("form", "t", "q", "xmax", "T", "seed", "out", "cache"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    try:
        if args.d is not None:
            data["d"] = _parse_list(args.d, int)
        if args.delta_grid is not None:
            data["delta_grid"] = _parse_list(args.delta_grid, float)
        if args.interval is not None:
            data["interval"] = _parse_list(args.interval, float)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(**data).validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "gen":
            print(cmd_gen(cfg))
        elif args.command == "signs":
            result = cmd_signs(cfg)
            if result["disagreements"]:
                write_json(Path(cfg.out) / "failure.json", {"failed": [{"name": "sign criterion", "primes": result["disagreements"]}]}, cfg)
                print(f"sign criterion disagrees at {len(result['disagreements'])} primes", file=sys.stderr)
                return EXIT_ASSERT
        elif args.command == "satotate":
            cmd_satotate(cfg)
        elif args.command == "density":
            cmd_density(cfg)
        elif args.command == "fit":
            cmd_fit(cfg, Path(args.input) if args.input else None)
        elif args.command == "report":
            result = cmd_report(cfg)
            for c in result["checks"]:
                print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}: {c['value']}")
            if result["failed"]:
                return EXIT_ASSERT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingCache as exc:
        print(f"missing cache: {exc}", file=sys.stderr)
        return EXIT_NO_CACHE
    except CacheError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_NO_CACHE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
