"""Experiment orchestration and CSV/JSON emission.

Every experiment is deterministic for a fixed resolved configuration: no
wall clock, no RNG, and the manifest embeds the full config plus content
hashes, so re-running from a manifest reproduces identical bytes.
Independent per-order tasks fan out across a process pool when
``PADELAB_THREADS`` is set above one.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath as mp

from . import equilibrium as eq
from .chebpade import bridge_classL, bridge_prop1
from .functions import (ClassL, InvSqrt, MarkovArcsine, NikishinSecond,
                        evaluate, laurent_coeffs)
from .hermite import hp_type1
from .numkernel import PrecisionCtx, laurent_mul
from .pade import (InterpolationTable, check_contour_orthogonality,
                   check_power_orthogonality, multipoint_pade,
                   pade_at_infinity)
from .roots import (counting_measure, find_roots, potential_discrepancy,
                    probe_circle, read_zeros_csv, trimmed_hausdorff)

EXPERIMENTS = ("fig-hp", "fig-che", "markov-demo", "prop1-check",
               "classl-check", "equilibrium-check", "interp-demo")

DESK_LIMIT = 80  # orders above this require --large


class ConfigError(Exception):
    pass


class SolverError(Exception):
    pass


# section-7 style product defaults: A3 = 3/2, A_{1,2} = 1/5 +- (6/5) i
DEFAULT_CLASSL = {
    "a_points": [[0.2, 1.2], [0.2, -1.2], [1.5, 0.0]],
    "exponents": ["-1/3", "-1/3", "2/3"],
}


@dataclass
class ExperimentConfig:
    experiment: str
    ns: list = field(default_factory=list)
    bits: int | None = None
    out_dir: str = "out"
    large: bool = False
    sigma_interval: list = field(default_factory=lambda: [2, 3])
    classl: dict = field(default_factory=lambda: dict(DEFAULT_CLASSL))
    grid_n: int = 400
    hp_n: int | None = None
    node_circle: dict = field(default_factory=lambda:
                              {"center": [2.5, 0.0], "radius": 3.0})
    trim: float = 0.05

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; "
                              f"choose from {', '.join(EXPERIMENTS)}")
        if not self.ns:
            raise ConfigError("at least one order n is required (--n)")
        if any(n < 1 for n in self.ns):
            raise ConfigError("orders must be >= 1")
        if not self.large and max(self.ns) > DESK_LIMIT:
            raise ConfigError(
                f"n = {max(self.ns)} exceeds the desk-scale limit "
                f"{DESK_LIMIT}; pass --large to run anyway (expect hours "
                f"at high precision)")
        if self.bits is not None and self.bits < 64:
            raise ConfigError("bits must be >= 64")
        if not (0 <= self.trim < 0.5):
            raise ConfigError("trim must lie in [0, 1/2)")
        c, d = self.sigma_interval
        if not c < d:
            raise ConfigError("sigma interval must increase")

    def resolved(self) -> dict:
        return {
            "experiment": self.experiment,
            "ns": sorted(self.ns),
            "bits": self.bits,
            "out_dir": self.out_dir,
            "large": self.large,
            "sigma_interval": list(self.sigma_interval),
            "classl": self.classl,
            "grid_n": self.grid_n,
            "hp_n": self.hp_n,
            "node_circle": self.node_circle,
            "trim": self.trim,
        }


def _ctx_for(cfg_bits, n: int, per_order: int) -> PrecisionCtx:
    bits = cfg_bits if cfg_bits is not None else max(256, per_order * n)
    return PrecisionCtx(bits)


def _classl_spec(classl_params: dict) -> ClassL:
    As = tuple(complex(re, im) for re, im in classl_params["a_points"])
    ex = tuple(Fraction(e) for e in classl_params["exponents"])
    return ClassL(As, ex)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("PADELAB_THREADS", "1")))
    except ValueError:
        return 1


def _map_tasks(fn, items):
    """Order-preserving map over independent picklable tasks; fans out to a
    process pool when PADELAB_THREADS > 1."""
    nproc = worker_count()
    if nproc <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(nproc, len(items))) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FileRecord:
    name: str
    text: str
    rows: int | None = None


def write_outputs(records, out_dir, experiment: str, config: dict,
                  diagnostics: dict) -> dict:
    """Write files plus a manifest carrying content hashes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for rec in records:
        path = out / rec.name
        path.write_text(rec.text, encoding="utf-8")
        digest = hashlib.sha256(rec.text.encode("utf-8")).hexdigest()
        entry = {"name": rec.name, "sha256": digest,
                 "bytes": len(rec.text.encode("utf-8"))}
        if rec.rows is not None:
            entry["rows"] = rec.rows
        files.append(entry)
    manifest = {
        "experiment": experiment,
        "config": config,
        "files": files,
        "diagnostics": diagnostics,
    }
    text = json.dumps(manifest, indent=2, sort_keys=True)
    (out / f"{experiment}_manifest.json").write_text(text, encoding="utf-8")
    return manifest


def _zeros_record(name: str, points, source: str, n: int,
                  digits: int) -> FileRecord:
    buf = io.StringIO()
    buf.write("re,im,source,n\r\n")
    for z in points:
        buf.write(f"{mp.nstr(z.real, digits)},{mp.nstr(z.imag, digits)},"
                  f"{source},{n}\r\n")
    return FileRecord(name, buf.getvalue(), rows=len(points))


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def _fig_task(args) -> tuple:
    """One order of a figure experiment; returns picklable records."""
    which, cfg_bits, classl_params, n = args
    f = _classl_spec(classl_params)
    ctx_p = _ctx_for(cfg_bits, n, 24)
    ctx_h = _ctx_for(cfg_bits, n, 32)
    records = []
    pade_target = f if which == "fig-hp" else InvSqrt()
    tail_p = laurent_coeffs(pade_target, 2 * n + 2, ctx_p)
    pair = pade_at_infinity(tail_p, n, ctx_p)
    records.append(_zeros_record(f"{which}_pade-p0_{n}.csv",
                                 find_roots(pair.p).points,
                                 "pade-p0", n, ctx_p.decimal_digits))
    records.append(_zeros_record(f"{which}_pade-p1_{n}.csv",
                                 find_roots(pair.q).points,
                                 "pade-p1", n, ctx_p.decimal_digits))
    K = 3 * n + 2
    tail_f = laurent_coeffs(f, K, ctx_h)
    if which == "fig-hp":
        t1, t2 = tail_f, laurent_mul(tail_f, tail_f)
    else:
        t1, t2 = laurent_coeffs(InvSqrt(), K, ctx_h), tail_f
    trip = hp_type1(t1, t2, n, ctx_h)
    q2_points = None
    for label, poly in (("hp-q0", trip.q0), ("hp-q1", trip.q1),
                        ("hp-q2", trip.q2)):
        zs = find_roots(poly)
        if label == "hp-q2":
            q2_points = [(str(z.real), str(z.imag)) for z in zs.points]
        records.append(_zeros_record(f"{which}_{label}_{n}.csv", zs.points,
                                     label, n, ctx_h.decimal_digits))
    recs = [(r.name, r.text, r.rows) for r in records]
    return n, recs, trip.degenerate, q2_points


def _fig_experiment(cfg: ExperimentConfig, which: str) -> dict:
    tasks = [(which, cfg.bits, cfg.classl, n) for n in sorted(cfg.ns)]
    results = _map_tasks(_fig_task, tasks)
    records = []
    diag = {"degenerate": {}, "cross_distance": {}}
    for n, recs, degenerate, q2_points in results:
        records.extend(FileRecord(*r) for r in recs)
        diag["degenerate"][str(n)] = degenerate
        sibling = "fig-che" if which == "fig-hp" else "fig-hp"
        other = Path(cfg.out_dir) / f"{sibling}_hp-q2_{n}.csv"
        if other.exists():
            mine = [complex(float(re), float(im)) for re, im in q2_points]
            theirs = [complex(float(re), float(im))
                      for re, im, _, _ in read_zeros_csv(other)]
            diag["cross_distance"][str(n)] = trimmed_hausdorff(
                mine, theirs, cfg.trim)
        else:
            diag["cross_distance"][str(n)] = None
    return write_outputs(records, cfg.out_dir, which, cfg.resolved(), diag)


def _markov_demo(cfg: ExperimentConfig) -> dict:
    c, d = cfg.sigma_interval
    f = MarkovArcsine(c, d)
    records = []
    decay_rows = ["n,abs_error_at_0,max_power_moment\r\n"]
    diag = {"pole_range": {}}
    for n in sorted(cfg.ns):
        ctx = _ctx_for(cfg.bits, n, 24)
        tail = laurent_coeffs(f, 2 * n + 2, ctx)
        pair = pade_at_infinity(tail, n, ctx)
        zq = find_roots(pair.q)
        records.append(_zeros_record(f"markov-demo_poles_{n}.csv", zq.points,
                                     "poles", n, ctx.decimal_digits))
        with ctx.workprec():
            err = abs(evaluate(f, 0, ctx) - pair(mp.mpf(0)))
        ortho = check_power_orthogonality(pair.q, (c, d), n, ctx)
        decay_rows.append(f"{n},{mp.nstr(err, 12)},"
                          f"{mp.nstr(ortho.max_abs, 8)}\r\n")
        reals = [z.real for z in zq.points]
        diag["pole_range"][str(n)] = [mp.nstr(min(reals), 10),
                                      mp.nstr(max(reals), 10)]
    records.append(FileRecord("markov-demo_decay.csv", "".join(decay_rows),
                              rows=len(cfg.ns)))
    return write_outputs(records, cfg.out_dir, "markov-demo",
                         cfg.resolved(), diag)


def _bridge_task(args) -> dict:
    kind, cfg_bits, c, d, n = args
    ctx = _ctx_for(cfg_bits, n, 32)
    if kind == "prop1":
        return bridge_prop1((-1, 1), (c, d), n, ctx).to_dict()
    return bridge_classL(c, d, Fraction(1, 2), n, ctx).to_dict()


def _bridge_check(cfg: ExperimentConfig, kind: str) -> dict:
    c, d = cfg.sigma_interval if kind == "prop1" else (2, 3)
    tasks = [(kind, cfg.bits, c, d, n) for n in sorted(cfg.ns)]
    reports = _map_tasks(_bridge_task, tasks)
    name = "prop1-check" if kind == "prop1" else "classl-check"
    rec = FileRecord(f"{name}_report.json",
                     json.dumps(reports, indent=2, sort_keys=True))
    worst = max(mp.mpf(r["deviation"]) for r in reports)
    return write_outputs([rec], cfg.out_dir, name, cfg.resolved(),
                         {"max_deviation": mp.nstr(worst, 8)})


def _equilibrium_check(cfg: ExperimentConfig) -> dict:
    c, d = (float(x) for x in cfg.sigma_interval)
    scalar = eq.solve_scalar((-1, 1), 1.0, N=cfg.grid_n)
    problem = eq.EquilibriumProblem(supports=((-1, 1), (c, d)),
                                    grid_sizes=(cfg.grid_n, cfg.grid_n))
    vector = eq.solve_vector(problem)
    records = []
    for tag, sol, comp in (("scalar", scalar, 0), ("vector0", vector, 0),
                           ("vector1", vector, 1)):
        rows = ["center,weight,density\r\n"]
        dens = sol.densities()[comp]
        for x, w, rho in zip(sol.centers[comp], sol.weights[comp], dens):
            rows.append(f"{x!r},{w!r},{rho!r}\r\n")
        records.append(FileRecord(f"equilibrium-check_{tag}_{cfg.grid_n}.csv",
                                  "".join(rows), rows=len(dens)))
    diag = {"scalar": scalar.to_dict(), "vector": vector.to_dict()}
    hp_n = 16 if cfg.hp_n is None else cfg.hp_n  # 0 disables the cross-check
    if hp_n:
        n = hp_n
        ctx = _ctx_for(cfg.bits, n, 32)
        K = 3 * n + 2
        f1 = laurent_coeffs(InvSqrt(), K, ctx)
        f2 = NikishinSecond(cfg.sigma_interval[0],
                            cfg.sigma_interval[1]).moment_tail(K, ctx)
        trip = hp_type1(f1, f2, n, ctx)
        zq2 = find_roots(trip.q2)
        mu_n = counting_measure(zq2.points, 1.0)
        probes = probe_circle(5.0, 64)
        disc = potential_discrepancy(mu_n, vector.component_measure(1),
                                     probes, mass_tol=0.05)
        diag["hp_q2_potential_discrepancy"] = disc
    return write_outputs(records, cfg.out_dir, "equilibrium-check",
                         cfg.resolved(), diag)


def _interp_demo(cfg: ExperimentConfig) -> dict:
    c, d = cfg.sigma_interval
    f = MarkovArcsine(c, d)
    center = complex(*cfg.node_circle["center"])
    radius = float(cfg.node_circle["radius"])
    records = []
    diag = {}
    for n in sorted(cfg.ns):
        ctx = _ctx_for(cfg.bits, n, 32)
        table = InterpolationTable.on_circle(2 * n, center, radius, ctx)
        pair = multipoint_pade(f, table, n, ctx)
        zq = find_roots(pair.q)
        records.append(_zeros_record(f"interp-demo_poles_{n}.csv", zq.points,
                                     "poles", n, ctx.decimal_digits))
        ortho = check_contour_orthogonality(
            pair.q, f, table, (c + d) / 2, (d - c) / 2 + 0.5, ctx, n=n,
            extra_power=1)
        diag[str(n)] = {
            "node_residual": mp.nstr(pair.residual, 8),
            "lost_count": pair.lost_count,
            "orthogonality": ortho.to_dict(),
            "first_nonzero_moment": mp.nstr(ortho.values[n], 8),
        }
    return write_outputs(records, cfg.out_dir, "interp-demo",
                         cfg.resolved(), diag)


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Dispatch one experiment; returns its manifest."""
    cfg.validate()
    try:
        if cfg.experiment in ("fig-hp", "fig-che"):
            return _fig_experiment(cfg, cfg.experiment)
        if cfg.experiment == "markov-demo":
            return _markov_demo(cfg)
        if cfg.experiment == "prop1-check":
            return _bridge_check(cfg, "prop1")
        if cfg.experiment == "classl-check":
            return _bridge_check(cfg, "classl")
        if cfg.experiment == "equilibrium-check":
            return _equilibrium_check(cfg)
        if cfg.experiment == "interp-demo":
            return _interp_demo(cfg)
    except ConfigError:
        raise
    except Exception as exc:  # solver failures surface with the step named
        raise SolverError(f"{cfg.experiment} failed: {exc}") from exc
    raise ConfigError(f"unknown experiment {cfg.experiment!r}")


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="padelab",
        description="rational-approximation experiments with free poles")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--n", type=int, nargs="+", help="orders to run")
    ap.add_argument("--bits", type=int, help="binary precision override")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--large", action="store_true",
                    help="allow orders beyond the desk-scale limit")
    ap.add_argument("--hp-n", type=int, dest="hp_n",
                    help="HP cross-check order for equilibrium-check")
    return ap


def config_from_args(argv) -> ExperimentConfig:
    args = _build_parser().parse_args(argv)
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
    raw["experiment"] = args.experiment
    if args.n:
        raw["ns"] = args.n
    if args.bits is not None:
        raw["bits"] = args.bits
    if args.out:
        raw["out_dir"] = args.out
    if args.large:
        raw["large"] = True
    if args.hp_n is not None:
        raw["hp_n"] = args.hp_n
    known = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**raw)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        if cfg.large and cfg.ns and max(cfg.ns) > DESK_LIMIT:
            print(f"warning: n = {max(cfg.ns)} beyond desk scale; this can "
                  f"take hours at high precision", file=sys.stderr)
        manifest = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    print(json.dumps({"experiment": manifest["experiment"],
                      "files": [f["name"] for f in manifest["files"]]},
                     indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
