"""Command line front end: ``betaspec <command> ...``.

Every command is described by ``(command, params, seed)``. The same triple is
written to a manifest (embedded in JSON output, or a ``<out>.manifest.json``
sidecar for CSV) and ``betaspec replay`` re-executes it byte for byte.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from . import __version__
from .diagnostics import ball_statistics, convergence_sweep, empirical_moments, histogram, parse_grid
from .ensembles import EnsembleKind, EnsembleParams, TridiagonalMatrix, sample_matrix
from .errors import AccuracyError, ParameterError
from .limits import (HermiteConditional, LaguerreConditional, MarchenkoPastur, Semicircle,
                     expected_density_numeric, limit_law)
from .sampling import RngStream
from .spectral import eigenvalues, spectral_measure_at_root

STOCHASTIC = {"sample", "converge", "ballstats"}


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int | None
    tool_version: str
    timestamp: str | None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        return cls(d["command"], dict(d["params"]), d.get("seed"), d["tool_version"], d.get("timestamp"))


def fmt(v) -> str:
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(x if isinstance(x, str) else (str(x) if isinstance(x, (int, np.integer)) else fmt(x))
                           for x in row) + "\n")
    return buf.getvalue()


# --- argument parsing -----------------------------------------------------

def _add_ensemble(p, required=True):
    p.add_argument("--ensemble", choices=[k.value for k in EnsembleKind], required=required)
    p.add_argument("--beta", type=float, default=None, required=required)
    p.add_argument("--gamma", type=float, default=None)


def _add_common(p, seed=True):
    if seed:
        p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output path (default: standard output)")
    p.add_argument("--stamp", action="store_true", help="record the wall-clock time in the manifest")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="betaspec", description="beta-ensemble spectra and their local limits")
    ap.add_argument("--version", action="version", version=f"betaspec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a tridiagonal matrix (JSON)")
    _add_ensemble(p)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    for name, hlp in (("eigen", "eigenvalues (CSV)"), ("rootmeasure", "spectral measure at a root (CSV)")):
        p = sub.add_parser(name, help=hlp)
        _add_ensemble(p, required=False)
        p.add_argument("--n", type=int)
        p.add_argument("--input", default=None, help="matrix JSON written by `sample`")
        if name == "eigen":
            p.add_argument("--histogram", default=None, metavar="lo:hi:count",
                           help="emit a histogram with count bins instead of the eigenvalues")
        else:
            p.add_argument("--root", type=int, required=True)
        _add_common(p)

    p = sub.add_parser("density", help="limit or conditional density on a grid (CSV)")
    p.add_argument("--law", required=True,
                   choices=["semicircle", "marchenko-pastur", "hermite-conditional", "laguerre-conditional"])
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--u", type=float, default=None)
    p.add_argument("--grid", required=True, metavar="lo:hi:count")
    _add_common(p, seed=False)

    p = sub.add_parser("crosscheck", help="quadrature over u versus the closed-form limit density (CSV)")
    _add_ensemble(p)
    p.add_argument("--grid", default=None, metavar="lo:hi:count",
                   help="default: 100 interior points of the support")
    p.add_argument("--tol", type=float, default=1e-8)
    _add_common(p, seed=False)

    p = sub.add_parser("converge", help="KS distance to the limit law over sizes (CSV)")
    _add_ensemble(p)
    p.add_argument("--sizes", required=True, metavar="a,b,c")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("ballstats", help="local weight statistics around uniform roots (CSV)")
    _add_ensemble(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--draws", type=int, default=10000)
    p.add_argument("--per-draw", action="store_true", help="one row per draw instead of a summary")
    _add_common(p)

    p = sub.add_parser("moments", help="limit-law moments, optionally against a sampled spectrum (CSV)")
    _add_ensemble(p)
    p.add_argument("--kmax", type=int, default=6)
    p.add_argument("--n", type=int, default=None, help="also report empirical moments of one sample")
    _add_common(p)

    p = sub.add_parser("replay", help="re-run a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    return ap


def _params_from_args(ap, args) -> tuple[str, dict, int | None]:
    cmd = args.command
    skip = {"command", "out", "stamp", "seed"}
    params = {k: v for k, v in vars(args).items() if k not in skip and v is not None and v is not False}
    seed = getattr(args, "seed", None)
    needs_seed = cmd in STOCHASTIC or (cmd in ("eigen", "rootmeasure") and args.input is None) \
        or (cmd == "moments" and args.n is not None)
    if needs_seed and seed is None:
        ap.error(f"{cmd}: --seed is required")
    if not needs_seed:
        seed = None
    if cmd in ("eigen", "rootmeasure") and args.input is None:
        if args.ensemble is None or args.beta is None or args.n is None:
            ap.error(f"{cmd}: give --input or --ensemble/--beta/--n")
    if cmd in ("eigen", "rootmeasure") and args.input is not None and args.ensemble is not None:
        ap.error(f"{cmd}: --input and --ensemble are exclusive")
    return cmd, params, seed


# --- execution ------------------------------------------------------------

def _ensemble(params: dict) -> EnsembleParams:
    kind = EnsembleKind(params["ensemble"])
    if kind is EnsembleKind.LAGUERRE:
        if params.get("gamma") is None:
            raise ParameterError("laguerre needs --gamma")
        return EnsembleParams.laguerre(params["beta"], params["gamma"])
    return EnsembleParams.hermite(params["beta"])


def _matrix(params: dict, seed) -> TridiagonalMatrix:
    if params.get("input"):
        with open(params["input"], encoding="utf-8") as fh:
            data = json.load(fh)
        return TridiagonalMatrix(data["diag"], data["offdiag"])
    return sample_matrix(_ensemble(params), params["n"], RngStream(seed))


def _law(params: dict):
    law, b, g, u = params["law"], params["beta"], params.get("gamma"), params.get("u")
    if law in ("marchenko-pastur", "laguerre-conditional") and g is None:
        raise ParameterError(f"{law} needs --gamma")
    if law.endswith("conditional") and u is None:
        raise ParameterError(f"{law} needs --u")
    if law == "semicircle":
        return Semicircle(b)
    if law == "marchenko-pastur":
        return MarchenkoPastur(b, g)
    if law == "hermite-conditional":
        return HermiteConditional(u, b)
    return LaguerreConditional(u, b, g)


def execute(man: RunManifest) -> tuple[str, str]:
    """Run a manifest; returns (text, kind) with kind 'json' or 'csv'."""
    cmd, p, seed = man.command, man.params, man.seed

    if cmd == "sample":
        ens = _ensemble(p)
        T = sample_matrix(ens, p["n"], RngStream(seed))
        doc: dict[str, Any] = {"manifest": man.to_dict(), "ensemble": ens.kind.value, "beta": ens.beta}
        if ens.gamma is not None:
            doc["gamma"] = ens.gamma
        doc.update({"n": T.n, "diag": T.diag.tolist(), "offdiag": T.offdiag.tolist()})
        return json.dumps(doc) + "\n", "json"

    if cmd == "eigen":
        lam = eigenvalues(_matrix(p, seed))
        if p.get("histogram"):
            spec = p["histogram"].split(":")
            if len(spec) != 3:
                raise ParameterError("histogram must look like lo:hi:count")
            edges = parse_grid(f"{spec[0]}:{spec[1]}:{int(spec[2]) + 1}")
            h = histogram(lam, edges)
            return csv_text(["bin_left", "bin_right", "count", "density"], h.rows()), "csv"
        return csv_text(["index", "eigenvalue"], enumerate(lam)), "csv"

    if cmd == "rootmeasure":
        T = _matrix(p, seed)
        mu = spectral_measure_at_root(T, p["root"])
        return csv_text(["location", "mass"], mu.atoms), "csv"

    if cmd == "density":
        law = _law(p)
        xs = parse_grid(p["grid"])
        return csv_text(["x", "density"], zip(xs, law.density(xs, at_singular="inf"))), "csv"

    if cmd == "crosscheck":
        ens = _ensemble(p)
        law = limit_law(ens)
        if p.get("grid"):
            xs = parse_grid(p["grid"])
        else:
            xs = law.lo + (law.hi - law.lo) * (np.arange(1, 101) / 101.0)
        tol = p.get("tol", 1e-8)
        rows = []
        for x in xs:
            num = expected_density_numeric(ens, x, quad_tol=min(tol, 1e-10) / 10)
            exact = law.density(x, at_singular="inf")
            rows.append((x, num, exact, abs(num - exact)))
        worst = max(r[3] for r in rows)
        if not worst <= tol:
            raise AccuracyError(f"crosscheck failed: max deviation {worst:g} > {tol:g}")
        return csv_text(["x", "numeric", "closed_form", "abs_error"], rows), "csv"

    if cmd == "converge":
        sizes = [int(s) for s in str(p["sizes"]).split(",") if s.strip()]
        rep = convergence_sweep(_ensemble(p), sizes, p["trials"], RngStream(seed), workers=p.get("workers", 1))
        return csv_text(["n", "trials", "ks_mean", "ks_std"],
                        ((r.n, r.trials, r.ks_mean, r.ks_std) for r in rep.rows)), "csv"

    if cmd == "ballstats":
        ens = _ensemble(p)
        bs = ball_statistics(ens, p["n"], p.get("radius", 1), p.get("draws", 10000), RngStream(seed))
        if p.get("per_draw"):
            spread = bs.edge_spread() if bs.radius > 0 else np.zeros(bs.roots.size)
            rows = zip(range(bs.roots.size), bs.roots.tolist(), bs.u, bs.root_loop, bs.root_edge,
                       bs.scaled_root_edge(), spread)
            return csv_text(["draw", "root", "u", "root_loop", "root_edge", "scaled_root_edge", "edge_spread"],
                            rows), "csv"
        if ens.kind is EnsembleKind.HERMITE:
            stats = [("ks_scaled_root_edge_vs_uniform", bs.ks_root_edge())]
        else:
            stats = [("ks_root_edge_vs_limit", bs.ks_root_edge()),
                     ("ks_root_loop_vs_limit", bs.ks_root_loop())]
        if bs.radius > 0:
            stats.append(("edge_spread_q99", float(np.quantile(bs.edge_spread(), 0.99))))
        return csv_text(["statistic", "value"], stats), "csv"

    if cmd == "moments":
        ens = _ensemble(p)
        law = limit_law(ens)
        kmax = p.get("kmax", 6)
        if kmax < 0:
            raise ParameterError("kmax must be >= 0")
        lim = [law.moment(k) for k in range(kmax + 1)]
        if p.get("n") is not None:
            emp = empirical_moments(eigenvalues(sample_matrix(ens, p["n"], RngStream(seed))), kmax)
            return csv_text(["k", "limit", "empirical"], zip(range(kmax + 1), lim, emp)), "csv"
        return csv_text(["k", "limit"], zip(range(kmax + 1), lim)), "csv"

    raise ParameterError(f"unknown command {cmd!r}")


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit(man: RunManifest, out: str | None):
    text, kind = execute(man)
    _write(text, out)
    if kind == "csv":
        mtext = json.dumps({"manifest": man.to_dict()}, indent=1) + "\n"
        if out is None:
            sys.stderr.write(json.dumps({"manifest": man.to_dict()}) + "\n")
        else:
            _write(mtext, out + ".manifest.json")


def _load_manifest(path: str) -> RunManifest:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if "manifest" not in data:
        raise ParameterError(f"{path} holds no manifest")
    return RunManifest.from_dict(data["manifest"])


_VALUE_FLAGS = ("--grid", "--histogram", "--sizes")


def _glue_values(argv: list[str]) -> list[str]:
    """Attach grid-like values to their flag so that ``--grid -2:2:5`` parses."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(_glue_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        if args.command == "replay":
            _emit(_load_manifest(args.manifest), args.out)
            return 0
        cmd, params, seed = _params_from_args(ap, args)
        stamp = _dt.datetime.now(_dt.timezone.utc).isoformat() if args.stamp else None
        _emit(RunManifest(cmd, params, seed, __version__, stamp), args.out)
        return 0
    except ParameterError as exc:
        print(f"betaspec: error: {exc}", file=sys.stderr)
        return 2
    except (AccuracyError, OSError, ValueError, KeyError) as exc:
        print(f"betaspec: error: {exc}", file=sys.stderr)
        return 1


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
