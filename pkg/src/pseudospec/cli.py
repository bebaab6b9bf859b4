"""Command-line front end.

    pseudospec <command> [--config FILE] [--set key=value]... [--seed N] [--out PATH]
    pseudospec <command> --preset NAME
    pseudospec presets

Each run writes ``result.csv``, ``result.json`` and ``manifest.json`` to the
output directory. Exit codes: 0 success, 2 input error, 3 budget error,
4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import platform
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from ._jit import backend_name
from .config import COMMANDS, DEFAULT_SEED, RunConfig, load_config_file, parse_value
from .errors import BudgetError, InputError
from .presets import PRESETS, preset

log = logging.getLogger("pseudospec")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


@dataclass
class Result:
    header: list[str]
    rows: list[list[Any]]
    payload: dict
    tolerances: dict = field(default_factory=dict)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return None if np.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def render_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- command runners ----------------------------------------------------------


def _deformation(g, p, q):
    from .flat_spectra import DeformationParameter

    return DeformationParameter.of(np.array(g, dtype=np.float64), p, q)


def _presentation(params):
    from .ads3 import GroupPresentation, cyclic_presentation, standard_presentation

    if params.get("generators") is not None:
        return GroupPresentation(np.array(params["generators"], dtype=np.float64))
    name = params["presentation"]
    if name == "standard":
        return standard_presentation(params["translation"])
    if name == "cyclic":
        return cyclic_presentation(params["translation"])
    raise InputError(f"parameter 'presentation' must be 'standard' or 'cyclic', got {name!r}")


def _cone(vectors, name):
    from .cartan import ConeSubset

    try:
        return ConeSubset(np.array(vectors, dtype=np.float64))
    except InputError as exc:
        raise InputError(f"parameter {name!r}: {exc}") from None


def run_flat_spectrum(p, seed) -> Result:
    from .flat_spectra import SpectrumWindow, enumerate_spectrum

    g = _deformation(p["g"], p["p"], p["q"])
    window = SpectrumWindow(p["lambda_min"], p["lambda_max"], p["box_radius"])
    sample = enumerate_spectrum(g, window, dedupe_tol=p["dedupe_tol"])
    n = g.n
    header = ["eigenvalue", "multiplicity"] + [f"m{i + 1}" for i in range(n)]
    rows = [[e.eigenvalue, e.multiplicity, *e.witness] for e in sample.entries]
    payload = {
        "entries": [{"eigenvalue": e.eigenvalue, "multiplicity": e.multiplicity, "witnesses": e.witnesses} for e in sample.entries],
        "complete_below_box": sample.complete_below_box,
        "window": [window.lambda_min, window.lambda_max],
        "box_radius": window.box_radius,
    }
    return Result(header, rows, payload, {"dedupe_tol": p["dedupe_tol"]})


def run_stability_scan(p, seed) -> Result:
    from .flat_spectra import SINGULAR_DRAW_TOL, SpectrumWindow, stability_scan

    g0 = _deformation(p["g0"], p["p"], p["q"])
    window = SpectrumWindow(p["lambda_min"], p["lambda_max"], p["box_radius"])
    common = stability_scan(g0, p["radius"], p["samples"], window, p["match_tol"], seed=seed)
    return Result(
        ["eigenvalue"],
        [[v] for v in common],
        {"common": common, "samples": p["samples"], "radius": p["radius"]},
        {"match_tol": p["match_tol"], "singular_draw_tol": SINGULAR_DRAW_TOL, "dedupe_tol": 1e-9},
    )


def run_oppenheim_scan(p, seed) -> Result:
    from .flat_spectra import SpectrumWindow, density_diagnostics

    g = _deformation(p["g"], p["p"], p["q"])
    windows = [SpectrumWindow(p["lambda_min"], p["lambda_max"], M) for M in p["box_radii"]]
    rep = density_diagnostics(g, windows, shrink_factor=p["shrink_factor"], search_bound=p["search_bound"], tol=p["tol"])
    cert = None
    if rep.certificate is not None:
        cert = {"scale": rep.certificate.scale, "matrix": rep.certificate.matrix}
    payload = {
        "classification": rep.classification.value,
        "box_radii": rep.box_radii,
        "min_gaps": rep.min_gaps,
        "gap_ratio": rep.gap_ratio,
        "certificate": cert,
        "hypotheses": rep.hypotheses,
        "hypotheses_met": rep.hypotheses_met,
        "warnings": rep.warnings,
    }
    rows = [[M, gap] for M, gap in zip(rep.box_radii, rep.min_gaps)]
    return Result(["box_radius", "min_gap"], rows, payload,
                  {"shrink_factor": p["shrink_factor"], "search_bound": p["search_bound"], "rational_tol": p["tol"]})


def run_cartan(p, seed) -> Result:
    from .cartan import AmbientGroup, cartan_projection

    elem = np.array(p["element"], dtype=np.float64)
    if p["group"] == "SL2xSL2":
        group = AmbientGroup.sl2xsl2()
    elif p["group"] == "SL_n":
        if elem.ndim != 2:
            raise InputError(f"parameter 'element' must be a square matrix for SL_n, got shape {elem.shape}")
        group = AmbientGroup.sl(elem.shape[0])
    else:
        raise InputError(f"parameter 'group' must be 'SL_n' or 'SL2xSL2', got {p['group']!r}")
    v = cartan_projection(group, elem)
    rows = [[i, c] for i, c in enumerate(v.coords)]
    return Result(["index", "coordinate"], rows, {"group": group.kind.value, "coords": v.coords, "norm": v.norm},
                  {"det_tol": 1e-6, "chamber_tol": 1e-9})


def run_properness(p, seed) -> Result:
    from .cartan import properness_check

    res = properness_check(_cone(p["muL"], "muL"), _cone(p["muH"], "muH"), p["probe_count"])
    payload = {"verdict": res.verdict.value, "witness": res.witness, "gap": res.gap}
    witness = "" if res.witness is None else " ".join(_fmt(x) for x in res.witness)
    return Result(["verdict", "gap", "witness"], [[res.verdict.value, res.gap, witness]], payload,
                  {"common_ray_tol": 1e-12, "boundary_tol": 1e-9})


def run_sharpness(p, seed) -> Result:
    from .ads3 import enumerate_ball
    from .cartan import estimate_sharpness

    pres = _presentation(p)
    ball = enumerate_ball(pres, p["word_radius"])
    est = estimate_sharpness(ball, _cone(p["muH"], "muH"), c_prime_cap=p["c_prime"], word_radius=p["word_radius"])
    payload = {
        "C": est.C, "C_prime": est.C_prime, "word_radius": est.word_radius, "samples": est.samples,
        "skipped": est.skipped, "sharp": est.sharp, "pareto": est.pareto, "norm": "euclidean",
    }
    rows = [[cp, c] for cp, c in sorted(est.pareto.items())]
    return Result(["c_prime", "C"], rows, payload, {"zero_mu_tol": 1e-9, "word_dedupe_tol": 1e-8})


def run_ads3_stable(p, seed) -> Result:
    from .ads3 import stability_experiment, stable_spectrum

    if p["C"] is not None:
        spec = stable_spectrum(p["C"], p["l_max"])
        payload = {"C": spec.C, "l_min": spec.l_min, "l_max": spec.l_max, "eigenvalues": spec.eigenvalues}
        return Result(["l", "eigenvalue"], [list(pair) for pair in spec.pairs], payload)
    rep = stability_experiment(
        _presentation(p), p["perturbation_scale"], p["samples"], p["word_radius"], p["l_max"], seed=seed
    )
    payload = {
        "min_C": rep.min_C, "base_C": rep.base_C, "sample_C": rep.sample_C,
        "all_proper_on_sample": rep.all_proper_on_sample,
        "l_min": rep.common_spectrum[0][0] if rep.common_spectrum else None,
        "eigenvalues": [e for _, e in rep.common_spectrum],
    }
    return Result(["l", "eigenvalue"], [list(pair) for pair in rep.common_spectrum], payload,
                  {"proper_C_threshold": 0.05, "word_dedupe_tol": 1e-8})


def run_orbit_count(p, seed) -> Result:
    from .ads3 import orbit_count

    oc = orbit_count(_presentation(p), p["word_radius"], p["radii"], complete_only=p["complete_only"])
    payload = {
        "radii": oc.radii, "counts": oc.counts, "fitted_slope": oc.fitted_slope, "word_radius": oc.word_radius,
        "max_norm": oc.max_norm, "complete_radius": oc.complete_radius, "incomplete": oc.incomplete,
    }
    return Result(["radius", "count"], [[r, c] for r, c in zip(oc.radii, oc.counts)], payload)


def run_poincare(p, seed) -> Result:
    from .ads3 import poincare_partial_sums

    ps = poincare_partial_sums(_presentation(p), p["decay_rate"], p["schedule"])
    payload = {"rows": ps.rows, "decay_rate": ps.decay_rate, "growth_bound": ps.growth_bound,
               "divergence_expected": ps.divergence_expected}
    return Result(["word_radius", "partial_sum", "increment"], [list(r) for r in ps.rows], payload)


RUNNERS: dict[str, Callable[[dict, int], Result]] = {
    "flat-spectrum": run_flat_spectrum,
    "stability-scan": run_stability_scan,
    "oppenheim-scan": run_oppenheim_scan,
    "cartan": run_cartan,
    "properness": run_properness,
    "sharpness": run_sharpness,
    "ads3-stable": run_ads3_stable,
    "orbit-count": run_orbit_count,
    "poincare": run_poincare,
}


def run(config: RunConfig) -> Result:
    """Dispatch, write ``result.csv``, ``result.json`` and ``manifest.json``."""
    start = time.perf_counter()
    result = RUNNERS[config.command](config.parameters, config.seed)
    elapsed = time.perf_counter() - start
    out = Path(config.output_path)
    manifest = {
        "tool": "pseudospec",
        "tool_version": __version__,
        "config": config.to_dict(),
        "duration_seconds": elapsed,
        "tolerances": result.tolerances,
        "backend": backend_name(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    write_atomic(out / "result.csv", render_csv(result.header, result.rows))
    write_atomic(out / "result.json", render_json({"command": config.command, "seed": config.seed, **result.payload}))
    write_atomic(out / "manifest.json", render_json(manifest))
    return result


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudospec", description="Spectra of flat and anti-de Sitter locally symmetric spaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", metavar="FILE", help="flat key/value JSON or a previous manifest.json")
        cmd.add_argument("--preset", metavar="NAME")
        cmd.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--out", default=".", metavar="PATH")
    sub.add_parser("presets", help="list available presets")
    return parser


def config_from_args(args) -> RunConfig:
    params: dict = {}
    seed = DEFAULT_SEED
    if args.preset:
        base = preset(args.preset)
        if base.command != args.command:
            raise InputError(f"preset {args.preset!r} belongs to command {base.command!r}, not {args.command!r}")
        params.update(base.parameters)
    if args.config:
        loaded = load_config_file(args.config)
        seed = loaded.pop("seed", seed)
        params.update(loaded)
    for item in args.overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise InputError(f"--set expects KEY=VALUE, got {item!r}")
        params[key.strip()] = parse_value(raw)
    if args.seed is not None:
        seed = args.seed
    return RunConfig(args.command, params, seed, args.out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "presets":
        for name, entry in sorted(PRESETS.items()):
            print(f"{name:22s} {entry.command:16s} {entry.reproduces}")
        return EXIT_OK
    try:
        config = config_from_args(args)
        result = run(config)
    except InputError as exc:
        print(f"pseudospec {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetError as exc:
        print(f"pseudospec {args.command}: budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except Exception as exc:  # noqa: BLE001 - reported as internal error
        log.debug("internal error", exc_info=True)
        print(f"pseudospec {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(render_json(result.payload))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
