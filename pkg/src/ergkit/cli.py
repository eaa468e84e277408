"""Command-line front end: ``ergkit {solve,curve,mf,sample,check}``.

Exit codes: 0 success, 1 usage, 2 domain rejection, 3 numerical failure.
Each run writes one JSON manifest (parameters, seed, version, wall time and
sha256 of every output file).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
import warnings
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .glauber import ChainConfig, SampleBatch, run_chains
from .landscape import (
    ALPHA_C,
    CRITICAL_POINT,
    CRITICAL_TRIANGLE_SCALE,
    H_C,
    BracketError,
    CriticalCurve,
    CriticalPoint,
    DomainError,
    Gaussian,
    GeneralizedGaussian,
    ModelParams,
    classify_phase,
    find_maximizers,
    limit_law_triangle,
    trace_critical_curve,
)
from .limitlab import check_series, concentration_check, histogram_table, standardize, write_histogram_csv
from .meanfield import LATTICES, EmptyWindow, WindowSpec, build_pmf, conditional_pmf, triangle_mean, triangle_variance

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _g17(x) -> str:
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # repr of a float is the shortest string that round-trips, never more than 17 digits
        return x if math.isfinite(x) else str(x)
    return obj


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _params(args) -> ModelParams:
    p = ModelParams(args.alpha, args.h)
    tol = getattr(args, "critical_tol", 0.0)
    if p != CRITICAL_POINT and abs(p.alpha - ALPHA_C) <= tol and abs(p.h - H_C) <= tol:
        print(f"note: ({p.alpha}, {p.h}) is within {tol:g} of the critical point; using (27/8, ln 2 - 3/2)",
              file=sys.stderr)
        p = CRITICAL_POINT
    p.require_replica_symmetric()
    return p


def _phase_dict(phase) -> dict:
    if isinstance(phase, CriticalPoint):
        return {"phase": "CriticalPoint", "u_c": phase.u_c}
    if isinstance(phase, CriticalCurve):
        return {"phase": "CriticalCurve", "u1": phase.u1, "u2": phase.u2}
    return {"phase": "Uniqueness", "u0": phase.u0}


def _law_dict(law) -> dict:
    out = {"law": type(law).__name__, **asdict(law)}
    if isinstance(law, GeneralizedGaussian):
        out["coefficient"] = law.coefficient
    return out


# --- subcommands -----------------------------------------------------------

def cmd_solve(args) -> tuple[dict, list]:
    p = _params(args)
    ms = find_maximizers(p)
    phase = classify_phase(p)
    res = {"alpha": p.alpha, "h": p.h, "maximizers": ms.maximizers, "residuals": ms.residuals,
           "free_energy": ms.free_energy, **_phase_dict(phase), "limit_law": _law_dict(limit_law_triangle(p))}
    if args.json:
        print(_dump(res))
    else:
        print("maximizers  " + " ".join(_g17(u) for u in ms.maximizers))
        print(f"free_energy {_g17(ms.free_energy)}")
        print(f"phase       {res['phase']}")
        print(f"limit_law   {res['limit_law']}")
    outputs = []
    if args.out:
        Path(args.out).write_text(_dump(res) + "\n")
        outputs.append(args.out)
    return res, outputs


def cmd_curve(args) -> tuple[dict, list]:
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    if not args.alpha_min > ALPHA_C:
        raise DomainError("--alpha-min must exceed 27/8")
    if args.alpha_max < args.alpha_min:
        raise UsageError("--alpha-max must be >= --alpha-min")
    pts = trace_critical_curve(np.linspace(args.alpha_min, args.alpha_max, args.points))
    out = args.out or "curve.csv"
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "q", "u1", "u2", "kappa"])
        for c in pts:
            w.writerow([_g17(c.alpha), _g17(c.h), _g17(c.u1), _g17(c.u2), _g17(c.kappa)])
    print(f"wrote {len(pts)} curve points to {out}")
    return {"points": len(pts)}, [out]


def cmd_mf(args) -> tuple[dict, list]:
    if args.n < 3:
        raise UsageError("--n must be >= 3")
    p = _params(args)
    pmf = build_pmf(args.n, p, args.lattice)
    res = {"n": args.n, "alpha": p.alpha, "h": p.h, "lattice": args.lattice,
           "log_partition": pmf.log_partition, "free_energy_n": pmf.log_partition / args.n**2}
    if args.window:
        idx, delta = int(args.window[0]), float(args.window[1])
        pmf = conditional_pmf(pmf, WindowSpec(idx, delta), find_maximizers(p))
        res["window"] = {"center_index": idx, "delta": delta}
    res["moments"] = {str(k): pmf.expect(pmf.support ** k) for k in args.moments}
    res["triangle_mean"] = triangle_mean(pmf)
    res["triangle_variance"] = triangle_variance(pmf)
    out = args.out or "pmf.csv"
    pmf.to_csv(out)
    summary = str(out) + ".json"
    Path(summary).write_text(_dump(res) + "\n")
    print(_dump(res))
    return res, [out, summary]


def cmd_sample(args) -> tuple[dict, list]:
    if args.chains < 1:
        raise UsageError("--chains must be >= 1")
    p = _params(args)
    phase = classify_phase(p)
    if isinstance(phase, (CriticalCurve, CriticalPoint)):
        warnings.warn(f"{type(phase).__name__} parameters: Glauber mixing is exponentially slow here; "
                      "samples are exploratory", RuntimeWarning, stacklevel=1)
    try:
        cfg = ChainConfig(args.n, p.alpha, p.h, seed=args.seed, burn_in_steps=args.burnin,
                          thin_steps=args.thin, num_samples=args.samples, init=args.init,
                          normalization=args.normalization)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    batches = run_chains(cfg, args.chains, args.threads)
    out = Path(args.out or "batch.csv")
    outputs = []
    if args.chains == 1:
        batches[0].to_csv(out)
        outputs += [str(out), str(out) + ".json"]
    else:
        for b in batches:
            path = out.with_name(f"{out.stem}_chain{b.chain}{out.suffix}")
            b.to_csv(path)
            outputs += [str(path), str(path) + ".json"]
    print(f"wrote {args.chains} chain(s) x {cfg.num_samples} samples to {out.parent}")
    return {"config": asdict(cfg), "chains": args.chains}, outputs


def _pick_law(batch: SampleBatch, choice: str):
    p = batch.config.params
    if choice == "quartic":
        return GeneralizedGaussian(CRITICAL_TRIANGLE_SCALE), "NonStdCLT"
    law = limit_law_triangle(p)
    if choice == "gaussian" and not isinstance(law, Gaussian):
        raise DomainError("no Gaussian limit law at these parameters")
    if isinstance(law, GeneralizedGaussian):
        return law, "NonStdCLT"
    return law, "CLT"


def cmd_check(args) -> tuple[dict, list]:
    batch = SampleBatch.from_csv(args.batch)
    out = Path(args.out or (str(args.batch) + ".check"))
    law, scaling = _pick_law(batch, args.law)
    report_path, hist_path = str(out) + ".json", str(out) + ".hist.csv"
    if hasattr(law, "kappa"):
        ms = find_maximizers(batch.config.params)
        conc = concentration_check(batch, ms, args.epsilon)
        res = {"law": _law_dict(law), "fraction_in_J": conc.fraction, "intervals": conc.intervals,
               "atom_fractions": conc.atom_fractions, "kappa": law.kappa}
        series = standardize(batch, "Raw")
        write_histogram_csv(hist_path, histogram_table(series, None, args.bins))
    else:
        series = standardize(batch, scaling, args.center)
        res = check_series(series, law).to_dict()
        write_histogram_csv(hist_path, histogram_table(series, law, args.bins))
    Path(report_path).write_text(_dump(res) + "\n")
    print(_dump(res))
    return res, [report_path, hist_path]


# --- wiring ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ergkit", description="Edge-triangle random graph toolkit")
    ap.add_argument("--version", action="version", version=f"ergkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, params=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--manifest", default=None, help="manifest path (default: next to the output)")
        if params:
            sp.add_argument("--alpha", type=float, required=True)
            sp.add_argument("--h", type=float, required=True)
            sp.add_argument("--critical-tol", type=float, default=1e-6,
                            help="snap (alpha, h) to the critical point when this close")

    sp = sub.add_parser("solve", help="maximizers, free energy, phase and limit law")
    common(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("curve", help="trace the critical curve h = q(alpha)")
    common(sp, params=False)
    sp.add_argument("--alpha-min", type=float, required=True)
    sp.add_argument("--alpha-max", type=float, required=True)
    sp.add_argument("--points", type=int, default=50)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("mf", help="exact mean-field edge-density pmf")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--window", nargs=2, metavar=("I", "DELTA"), default=None)
    sp.add_argument("--moments", type=int, nargs="*", default=[1, 2, 3, 4])
    sp.add_argument("--lattice", choices=LATTICES, default="literal")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_mf)

    sp = sub.add_parser("sample", help="Glauber dynamics sample batches")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--burnin", type=int, default=None)
    sp.add_argument("--thin", type=int, default=None)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--chains", type=int, default=1)
    sp.add_argument("--threads", type=int, default=None, help="default: ERGKIT_THREADS or CPU count")
    sp.add_argument("--init", choices=("empty", "complete", "bernoulli"), default="empty")
    sp.add_argument("--normalization", choices=("hamiltonian", "literal"), default="hamiltonian")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("check", help="compare a batch with its limit law")
    common(sp, params=False)
    sp.add_argument("--batch", required=True)
    sp.add_argument("--law", choices=("auto", "gaussian", "quartic"), default="auto")
    sp.add_argument("--center", type=float, default=None, help="triangle density centering (default: empirical)")
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--bins", type=int, default=40)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_check)
    return ap


def _manifest_path(args, outputs) -> str | None:
    if args.manifest:
        return args.manifest
    if outputs:
        return str(outputs[0]) + ".manifest.json"
    return None


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            result, outputs = args.func(args)
    except UsageError as exc:
        print(f"ergkit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, EmptyWindow) as exc:
        print(f"ergkit: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (BracketError, ArithmeticError) as exc:
        print(f"ergkit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"ergkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    params = {k: v for k, v in vars(args).items() if k not in ("func", "manifest")}
    manifest = {"subcommand": args.command, "params": params, "seed": args.seed, "version": __version__,
                "wall_time": time.perf_counter() - t0,
                "outputs": {str(o): _sha256(o) for o in outputs}}
    path = _manifest_path(args, outputs)
    if path:
        Path(path).write_text(_dump(manifest) + "\n")
    else:
        print(json.dumps(_jsonable(manifest), sort_keys=True), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
