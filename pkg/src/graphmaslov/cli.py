"""Command-line front end: JSON config in, JSON/CSV reports out.

One config document describes the graph, the vertex conditions (or a
one-parameter family of them), and per-command numbers.  Every report embeds
the fully resolved config, uses fixed iteration orders, and contains no
wall-clock content, so re-running a config byte-reproduces its outputs.

Exit codes: 0 success, 1 a verification flag came back false, 2 config error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .edge_solver import k_path_sampler
from .graph import Edge, MetricGraph, make_interval, make_star, validate_graph
from .maslov import LagrangianPath, maslov_index
from .spectral import eigenvalues_in, spectral_flow
from .symplectic import SymplecticSpace, is_lagrangian
from .vertex import (
    BoundaryPair,
    check_hypothesis,
    delta_star_family,
    delta_star_pair,
    dirichlet_pair,
    l_frame,
    neumann_pair,
    robin_interval_family,
    robin_interval_pair,
)
from .verify import hadamard_check, interlacing_check, maslov_box

COMMANDS = ("spectrum", "flow", "maslov", "box", "hadamard", "interlace", "check")

CSV_COLUMNS = {
    "spectrum": ["lambda", "multiplicity", "residual"],
    "flow": ["t", "crossing"],
    "maslov": ["s", "dim", "min_phase"],
    "box": ["side", "lambda", "dim"],
    "hadamard": ["method", "value"],
    "interlace": ["t", "lower", "upper", "count_below"],
    "check": ["quantity", "value"],
}


class ConfigError(ValueError):
    pass


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing required key {key!r}")
    return cfg[key]


def _build_graph(spec: dict) -> MetricGraph:
    if "edges" in spec:
        edges = []
        for e in spec["edges"]:
            pot = e.get("potential", 0.0)
            if isinstance(pot, (int, float)):
                pot = ((1.0, float(pot)),)
            else:
                pot = tuple((float(f), float(q)) for f, q in pot)
            edges.append(Edge(float(e["length"]), pot))
        g = MetricGraph(tuple(edges))
        validate_graph(g)
        return g
    builder = _require(spec, "builder")
    if builder == "interval":
        return make_interval(float(_require(spec, "length")), float(spec.get("potential", 0.0)))
    if builder == "star":
        return make_star(int(_require(spec, "degree")), spec.get("lengths"),
                         float(spec.get("potential", 0.0)))
    raise ConfigError(f"unknown graph builder {builder!r}")


def _parse_matrix(rows) -> np.ndarray:
    try:
        return np.array([[complex(c[0], c[1]) for c in row] for row in rows])
    except (TypeError, IndexError) as exc:
        raise ConfigError("matrix entries must be [re, im] pairs") from exc


def _build_pair(spec: dict, g: MetricGraph) -> BoundaryPair:
    if "a" in spec and "b" in spec:
        return BoundaryPair(_parse_matrix(spec["a"]), _parse_matrix(spec["b"]))
    builder = _require(spec, "builder")
    n = g.boundary_dim
    if builder == "dirichlet":
        return dirichlet_pair(n)
    if builder == "neumann":
        return neumann_pair(n)
    if builder == "robin":
        return robin_interval_pair(float(_require(spec, "t")), spec.get("right", "dirichlet"))
    if builder == "delta_star":
        return delta_star_pair(g, float(_require(spec, "t")),
                               spec.get("outer", "dirichlet"), float(spec.get("robin_c", 0.0)))
    raise ConfigError(f"unknown boundary builder {builder!r}")


def _build_family(spec: dict, g: MetricGraph):
    builder = _require(spec, "builder")
    if builder == "robin":
        return robin_interval_family(spec.get("right", "dirichlet"))
    if builder == "delta_star":
        return delta_star_family(g, spec.get("outer", "dirichlet"),
                                 float(spec.get("robin_c", 0.0)))
    raise ConfigError(f"unknown family builder {builder!r}")


def _check_tol(name: str, value: float) -> float:
    value = float(value)
    if not (1e-14 <= value <= 1e-2):
        raise ConfigError(f"{name} must lie in [1e-14, 1e-2], got {value}")
    return value


def _jsonable(obj):
    """Recursively convert dataclasses/arrays to plain JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [[[float(c.real), float(c.imag)] for c in row] for row in np.atleast_2d(obj)]
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return repr(obj)


# ---------------------------------------------------------------------------
# Command implementations: each returns (result, passed, crossings, certs, rows)


def _cmd_spectrum(cfg, g, tol_eig, grid_step):
    pair = _build_pair(_require(cfg, "boundary"), g)
    window = tuple(float(x) for x in _require(cfg, "window"))
    spec = eigenvalues_in(g, pair, window, grid_step, tol_eig)
    rows = [[h.lam, h.multiplicity, h.residual] for h in spec.eigenvalues]
    result = {"eigenvalues": rows, "count": spec.count(), "window": list(window)}
    return result, True, [], {}, rows


def _cmd_flow(cfg, g, tol_eig, grid_step):
    fam = _build_family(_require(cfg, "family"), g)
    interval = tuple(float(x) for x in _require(cfg, "range"))
    res = spectral_flow(g, fam, interval, grid_step=grid_step, tol_eig=tol_eig)
    result = {
        "flow": res.flow,
        "morse_alpha": res.morse_alpha,
        "morse_beta": res.morse_beta,
        "tracking_flow": res.tracking_flow,
    }
    rows = [[t, 1] for t in res.crossings]
    certs = {"floor": _jsonable(res.floor)}
    return result, res.flow == res.tracking_flow, res.crossings, certs, rows


def _cmd_maslov(cfg, g, tol_eig, grid_step):
    pair = _build_pair(_require(cfg, "boundary"), g)
    window = tuple(float(x) for x in _require(cfg, "window"))
    path = LagrangianPath(SymplecticSpace(g.boundary_dim), k_path_sampler(g), window)
    res = maslov_index(path, l_frame(pair))
    crossings = [{"s": c.s, "dim": c.dim} for c in res.crossings]
    rows = [[c.s, c.dim, c.min_phase] for c in res.crossings]
    return {"index": res.index, "n_samples": res.n_samples}, True, crossings, {}, rows


def _cmd_box(cfg, g, tol_eig, grid_step):
    fam = _build_family(_require(cfg, "family"), g)
    interval = tuple(float(x) for x in _require(cfg, "range"))
    rep = maslov_box(g, fam, interval, grid_step=grid_step, tol_eig=tol_eig)
    result = {
        "sides": list(rep.mas_sides),
        "morse_alpha": rep.morse_alpha,
        "morse_beta": rep.morse_beta,
        "spectral_flow": rep.spectral_flow,
        "maslov_index": rep.mas_index_theorem,
        "lam_top": rep.lam_top,
        "identities": {
            "eq_312": rep.eq_312,
            "sigma4_zero": rep.sigma4_zero,
            "box_sum_zero": rep.box_sum_zero,
            "flow_equals_mas": rep.flow_equals_mas,
            "crossing_forms_ok": rep.crossing_forms_ok,
        },
    }
    crossings = [
        {"side": c.side, "lambda": c.lam, "dim": c.report.dim,
         "diagonal": c.normalized_diagonal, "regular": c.report.regular}
        for c in rep.crossings
    ]
    rows = [[c.side, c.lam, c.report.dim] for c in rep.crossings]
    return result, rep.ok, crossings, {"floor": _jsonable(rep.floor)}, rows


def _cmd_hadamard(cfg, g, tol_eig, grid_step):
    fam = _build_family(_require(cfg, "family"), g)
    t0 = float(_require(cfg, "t0"))
    rep = hadamard_check(
        g, fam, t0,
        branch_lam=cfg.get("branch_lambda"),
        branch_index=int(cfg.get("branch_index", 1)),
        grid_step=grid_step, tol_eig=tol_eig,
    )
    result = _jsonable(rep)
    rows = [["finite_difference", rep.finite_difference],
            ["formula", rep.formula],
            ["crossing_form", rep.crossing_form_value]]
    return result, rep.ok, [], {}, rows


def _cmd_interlace(cfg, g, tol_eig, grid_step):
    fam = _build_family(_require(cfg, "family"), g)
    probes = [float(x) for x in _require(cfg, "probes")]
    rep = interlacing_check(
        g, fam, float(_require(cfg, "nu")), int(_require(cfg, "n")), probes,
        grid_step=grid_step, tol_eig=tol_eig,
    )
    result = _jsonable(rep)
    result["ok"] = rep.ok
    rows = [[p.t, p.lower, p.upper, p.count_below] for p in rep.probes]
    return result, rep.ok, [], {}, rows


def _cmd_check(cfg, g, tol_eig, grid_step):
    pair = _build_pair(_require(cfg, "boundary"), g)
    rep = check_hypothesis(pair)
    result = _jsonable(rep)
    rows = [["rank", rep.rank], ["sigma_min", rep.sigma_min],
            ["symmetry_residual", rep.symmetry_residual], ["det_gap", rep.det_gap]]
    if rep.ok:
        iso = is_lagrangian(l_frame(pair))
        result["lagrangian"] = _jsonable(iso)
        rows.append(["isotropy_residual", iso.isotropy_residual])
    else:
        raise ConfigError(f"boundary pair fails the hypothesis: {rep.reason}")
    return result, rep.ok, [], {}, rows


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "flow": _cmd_flow,
    "maslov": _cmd_maslov,
    "box": _cmd_box,
    "hadamard": _cmd_hadamard,
    "interlace": _cmd_interlace,
    "check": _cmd_check,
}


def run(command: str, cfg: dict, out_dir: Path | None, fmt: str,
        tol_eig: float, grid_step: float) -> int:
    g = _build_graph(_require(cfg, "graph"))
    result, passed, crossings, certs, rows = _DISPATCH[command](cfg, g, tol_eig, grid_step)
    report = {
        "config": _jsonable(dict(cfg, tol_eig=tol_eig, grid_step=grid_step)),
        "command": command,
        "result": result,
        "pass": bool(passed),
        "crossings": _jsonable(crossings),
        "certificates": certs,
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_dir is None:
        print(text)
    else:
        out_dir.mkdir(parents=True, exist_ok=True)
        if fmt in ("json", "both"):
            (out_dir / "report.json").write_text(text + "\n")
        if fmt in ("csv", "both"):
            with open(out_dir / "series.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_COLUMNS[command])
                writer.writerows(rows)
        print(f"{command}: {'pass' if passed else 'FAIL'} -> {out_dir}")
    return 0 if passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="graphmaslov",
        description="Spectra, Maslov indices and index-theorem checks on metric graphs",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a JSON config")
    parser.add_argument("--out", default=None, help="output directory (default: stdout)")
    parser.add_argument("--format", default="json", choices=["json", "csv", "both"])
    parser.add_argument("--tol-eig", type=float, default=1e-8)
    parser.add_argument("--grid", type=float, default=0.05)
    args = parser.parse_args(argv)
    try:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise ConfigError("config root must be a JSON object")
        tol_eig = _check_tol("tol_eig", args.tol_eig)
        if not (1e-6 <= args.grid <= 10.0):
            raise ConfigError(f"grid step must lie in [1e-6, 10], got {args.grid}")
        out_dir = Path(args.out) if args.out else None
        return run(args.command, cfg, out_dir, args.format, tol_eig, args.grid)
    except (ConfigError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
