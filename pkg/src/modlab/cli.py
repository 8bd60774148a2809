"""Command-line experiment runner: ``modlab <kind> --config path [--out path] [--grid N] [--seed S]``.

Each kind reads a JSON config, validates it against its schema, computes,
writes one artifact (JSON or CSV) and prints a one-line summary. Exit status
is 0 when the experiment's check passes, 2 when it fails and 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import io
from .curves import Curve
from .fields import ScalarField
from .hyperbolic import GridRegion, hyp_distance
from .mapping import dilatation, fmo_statistic, map_from_config, poletsky_verify
from .mobius import GroupPresentation, MobiusTransform, enumerate_orbit
from .modulus import (CurveFamily, admissibility_check, annulus_extremal_density,
                      annulus_radial_family, annulus_region, modulus, rectangle_family,
                      ring_modulus)
from .quotient import (DirichletPolygon, min_orbit_separation, normal_neighborhood_radius,
                       project, quotient_distance_info)

log = logging.getLogger(__name__)

KINDS = ("metric", "orbit", "dirichlet", "modulus", "poletsky", "fmo")

DEFAULT_TOLERANCES = {
    "metric": {"axiom": 1e-10, "invariance": 1e-10},
    "orbit": {"dedup": 1e-10},
    "dirichlet": {"boundary": 1e-12},
    "modulus": {"rel": 0.03, "kkt": 1e-7, "admissibility": 1e-6},
    "poletsky": {"rel": 0.03, "kkt": 1e-7, "expected": 0.05},
    "fmo": {"expected": 0.05},
}

# -- schemas -----------------------------------------------------------------

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_POS = {"type": "number", "exclusiveMinimum": 0}
_COUNT = {"type": "integer", "minimum": 1}
_GROUP = {
    "type": "object",
    "properties": {
        "generators": {"type": "array", "items": {
            "type": "object",
            "properties": {"a_re": {"type": "number"}, "a_im": {"type": "number"},
                           "theta": {"type": "number"}},
            "required": ["a_re"], "additionalProperties": False}},
        "max_word_length": {"type": "integer", "minimum": 0},
    },
    "required": ["generators"], "additionalProperties": False,
}
_FAMILY = {"oneOf": [
    {"type": "object", "properties": {
        "type": {"const": "annulus"}, "r": _POS, "R": _POS, "n_curves": _COUNT,
        "n_vertices": {"type": "integer", "minimum": 2}, "center": _POINT},
     "required": ["type", "r", "R", "n_curves"], "additionalProperties": False},
    {"type": "object", "properties": {
        "type": {"const": "rectangle"}, "x1": {"type": "number"}, "x2": {"type": "number"},
        "y1": {"type": "number"}, "y2": {"type": "number"}, "n_curves": _COUNT,
        "n_vertices": {"type": "integer", "minimum": 2}},
     "required": ["type", "x1", "x2", "y1", "y2", "n_curves"], "additionalProperties": False},
    {"type": "object", "properties": {
        "type": {"const": "curves"},
        "curves": {"type": "array", "minItems": 1,
                   "items": {"type": "array", "minItems": 2, "items": _POINT}}},
     "required": ["type", "curves"], "additionalProperties": False},
    {"type": "object", "properties": {"type": {"const": "file"}, "path": {"type": "string"}},
     "required": ["type", "path"], "additionalProperties": False},
]}
_MAP = {"type": "object", "properties": {
    "map": {"enum": ["conformal", "mobius", "affine", "radial_stretch"]},
    "a_re": {"type": "number"}, "a_im": {"type": "number"}, "theta": {"type": "number"},
    "k": {"type": "number"}, "k_re": {"type": "number"}, "k_im": {"type": "number"},
    "alpha": _POS}, "required": ["map"], "additionalProperties": False}
_FIELD = {"oneOf": [
    {"type": "object", "properties": {"type": {"const": "constant"}, "value": {"type": "number"}},
     "required": ["type", "value"], "additionalProperties": False},
    {"type": "object", "properties": {"type": {"const": "half_plane"}, "angle": {"type": "number"}},
     "required": ["type"], "additionalProperties": False},
    {"type": "object", "properties": {"type": {"const": "loglog"}, "z0": _POINT},
     "required": ["type", "z0"], "additionalProperties": False},
    {"type": "object", "properties": {"type": {"const": "dilatation"}, "map": _MAP},
     "required": ["type", "map"], "additionalProperties": False},
]}
_MODE = {"enum": ["hyperbolic", "euclidean"]}

PARAMETER_SCHEMAS = {
    "metric": {"type": "object", "properties": {
        "points": {"type": "array", "items": _POINT},
        "random_triples": {"type": "integer", "minimum": 0},
        "max_radius": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    }, "additionalProperties": False},
    "orbit": {"type": "object", "properties": {"group": _GROUP, "z0": _POINT},
              "required": ["group", "z0"], "additionalProperties": False},
    "dirichlet": {"type": "object", "properties": {
        "group": _GROUP, "center": _POINT,
        "probes": {"type": "array", "items": _POINT},
        "pairs": {"type": "array", "items": {"type": "array", "items": _POINT,
                                              "minItems": 2, "maxItems": 2}},
        "normal_neighborhood": {"type": "boolean"},
    }, "required": ["group", "center"], "additionalProperties": False},
    "modulus": {"type": "object", "properties": {
        "family": _FAMILY, "mode": _MODE,
        "method": {"enum": ["active-set", "projected-gradient"]},
        "expected": {"oneOf": [{"type": "number"}, {"const": "ring"}]},
    }, "required": ["family"], "additionalProperties": False},
    "poletsky": {"type": "object", "properties": {
        "map": _MAP, "family": _FAMILY, "mode": _MODE,
        "density": {"enum": ["optimal", "extremal"]},
        "expected": {"type": "object", "properties": {"lhs": {"type": "number"},
                                                      "rhs": {"type": "number"}},
                     "additionalProperties": False},
    }, "required": ["map", "family"], "additionalProperties": False},
    "fmo": {"type": "object", "properties": {
        "field": _FIELD, "p0": _POINT,
        "radii": {"type": "array", "items": _POS, "minItems": 1},
        "expected": {"type": "number"}, "bound": {"type": "number"},
    }, "required": ["field", "p0", "radii"], "additionalProperties": False},
}


def config_schema(kind):
    return {
        "type": "object",
        "properties": {
            "kind": {"const": kind},
            "parameters": PARAMETER_SCHEMAS[kind],
            "grid": {"type": "object", "properties": {
                "n": {"type": "integer", "minimum": 4},
                "half_width": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "center": _POINT}, "additionalProperties": False},
            "seed": {"type": "integer", "minimum": 0},
            "workers": {"type": "integer", "minimum": 1},
            "output": {"type": "object", "properties": {
                "path": {"type": "string"}, "format": {"enum": ["json", "csv"]}},
                "additionalProperties": False},
            "tolerances": {"type": "object", "properties": {
                k: _POS for k in DEFAULT_TOLERANCES[kind]}, "additionalProperties": False},
        },
        "required": ["parameters"],
        "additionalProperties": False,
    }


class ConfigError(ValueError):
    """Unreadable or invalid configuration; the message lists every problem."""


def _line_of(text, path):
    # best-effort location of a JSON path: follow the keys through the text
    pos = 0
    for key in path:
        if isinstance(key, str):
            m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
            if m:
                pos = m.start()
    return text.count("\n", 0, pos) + 1


def load_config(path, kind):
    """Parse and validate ``path`` for ``kind``; raise ConfigError with line numbers."""
    text = Path(path).read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(config_schema(kind))
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        lines = []
        for e in errors:
            where = "/".join(map(str, e.absolute_path)) or "<root>"
            lines.append(f"{path}:{_line_of(text, e.absolute_path)}: {where}: {e.message}")
        raise ConfigError("\n".join(lines))
    cfg.setdefault("kind", kind)
    cfg.setdefault("grid", {})
    cfg.setdefault("seed", 0)
    cfg.setdefault("output", {})
    cfg["tolerances"] = {**DEFAULT_TOLERANCES[kind], **cfg.get("tolerances", {})}
    cfg["_base"] = str(Path(path).resolve().parent)
    return cfg


# -- builders ------------------------------------------------------------------

def _pt(p):
    return complex(p[0], p[1])


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def build_family(spec, base="."):
    kind = spec["type"]
    if kind == "annulus":
        if not spec["r"] < spec["R"] < 1:
            raise ValueError("annulus family needs 0 < r < R < 1")
        return annulus_radial_family(spec["r"], spec["R"], spec["n_curves"],
                                     spec.get("n_vertices", 2), _pt(spec.get("center", [0, 0])))
    if kind == "rectangle":
        return rectangle_family(spec["x1"], spec["x2"], spec["y1"], spec["y2"], spec["n_curves"],
                                spec.get("n_vertices", 2))
    if kind == "curves":
        return CurveFamily(tuple(Curve(np.array([_pt(p) for p in c])) for c in spec["curves"]),
                           "curves")
    path = Path(base) / spec["path"]
    return io.read_family_dir(path) if path.is_dir() else io.read_family_json(path)


def build_region(grid, family_spec=None, default_n=256):
    n = grid.get("n", default_n)
    center = _pt(grid.get("center", [0, 0]))
    if "half_width" not in grid and family_spec and family_spec["type"] == "annulus":
        return annulus_region(family_spec["R"], n,
                              center=center + _pt(family_spec.get("center", [0, 0])))
    # cells falling outside the disk are masked by the region itself
    return GridRegion.square(grid.get("half_width", 0.7), n, center)


def build_group(spec):
    return GroupPresentation.from_dict(spec)


# -- experiments ---------------------------------------------------------------

class Outcome:
    """Result of one experiment before anything is written."""

    def __init__(self, headline, value, passed, detail, record, csv_rows=None, raster=None):
        self.headline = headline
        self.value = value
        self.passed = passed
        self.detail = detail
        self.record = record
        self.csv_rows = csv_rows
        self.raster = raster


def run_metric(cfg):
    p = cfg["parameters"]
    tol = cfg["tolerances"]
    rng = np.random.default_rng(cfg["seed"])
    n = p.get("random_triples", 1000)
    rmax = p.get("max_radius", 0.95)

    def sample(k):
        return rmax * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))

    z1, z2, z3 = sample(n), sample(n), sample(n)
    d12, d23, d13 = hyp_distance(z1, z2), hyp_distance(z2, z3), hyp_distance(z1, z3)
    axiom = 0.0
    if n:
        axiom = max(float(np.max(d13 - d12 - d23)), 0.0,
                    float(np.max(np.abs(d12 - hyp_distance(z2, z1)))),
                    float(np.max(np.abs(hyp_distance(z1, z1)))))
    a = 0.9 * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    th = 2 * np.pi * rng.random(n)
    g = lambda z: np.exp(1j * th) * (z - a) / (1 - np.conj(a) * z)  # noqa: E731
    inv = float(np.max(np.abs(hyp_distance(g(z1), g(z2)) - d12))) if n else 0.0
    pts = [_pt(q) for q in p.get("points", [])]
    pairwise = [[hyp_distance(u, v) for v in pts] for u in pts]
    rows = [["i", "j", "h"]] + [[i, j, pairwise[i][j]] for i in range(len(pts))
                                  for j in range(len(pts))]
    passed = axiom <= tol["axiom"] and inv <= tol["invariance"]
    record = {"kind": "metric", "h_0_half": hyp_distance(0, 0.5), "random_triples": n,
              "max_axiom_violation": axiom, "max_invariance_error": inv,
              "points": [_pair(z) for z in pts], "pairwise": pairwise,
              "tolerances": tol, "passed": passed}
    return Outcome("max_axiom_violation", axiom, passed,
                   f"invariance={inv:.3g} tol={tol['axiom']:g}", record, rows)


def run_orbit(cfg):
    p = cfg["parameters"]
    group = build_group(p["group"])
    z0 = _pt(p["z0"])
    orb = enumerate_orbit(group, z0)
    pts = orb.as_array()
    gaps = np.abs(pts[:, None] - pts[None, :]) + np.eye(pts.size)
    distinct = bool(np.min(gaps) >= cfg["tolerances"]["dedup"]) if pts.size > 1 else True
    sep = min_orbit_separation(z0, group)
    record = {"kind": "orbit", "z0": _pair(z0), "n_points": int(pts.size),
              "points": [_pair(z) for z in pts], "word_lengths": list(orb.word_lengths),
              "min_separation": None if np.isinf(sep) else sep,
              "exhausted": bool(group.exhausted), "passed": distinct}
    rows = [["re", "im", "word_length"]] + [[z.real, z.imag, w] for z, w in
                                            zip(pts, orb.word_lengths)]
    return Outcome("n_points", int(pts.size), distinct, f"min_separation={sep:.6g}", record, rows)


def run_dirichlet(cfg):
    p = cfg["parameters"]
    group = build_group(p["group"])
    center = _pt(p["center"])
    poly = DirichletPolygon.from_group(group, center)
    region = build_region(cfg["grid"])
    tol = cfg["tolerances"]["boundary"]
    raster = np.zeros(region.shape, dtype=bool)
    raster[region.mask] = poly.contains(region.centers[region.mask], tol=tol)
    area = float(np.sum(region.area_elements("hyperbolic")[raster]))
    probes = [_pt(q) for q in p.get("probes", [])]
    record = {"kind": "dirichlet", "center": _pair(center), "n_constraints": len(poly.constraints),
              "inside_cells": int(raster.sum()), "hyp_area_inside": area,
              "probes": [{"z": _pair(z), "inside": bool(poly.contains(z, tol=tol))} for z in probes]}
    pairs = []
    for a, b in p.get("pairs", []):
        info = quotient_distance_info(project(_pt(a), group), project(_pt(b), group))
        pairs.append({"z1": a, "z2": b, "distance": info.value, "word_length": info.word_length,
                      "h": hyp_distance(_pt(a), _pt(b))})
    record["pairs"] = pairs
    if p.get("normal_neighborhood"):
        record["normal_neighborhood_radius"] = normal_neighborhood_radius(
            project(center, group), seed=cfg["seed"])
        sep = min_orbit_separation(center, group)
        record["half_orbit_gap"] = None if np.isinf(sep) else sep / 2.0
    passed = bool(poly.contains(center, tol=tol))
    record["passed"] = passed
    return Outcome("hyp_area_inside", area, passed, f"center_inside={passed}", record,
                   raster=(region, raster.astype(float)))


def _expected_ok(value, expected, rel):
    return expected is None or abs(value - expected) <= rel * abs(expected)


def run_modulus(cfg):
    p = cfg["parameters"]
    tol = cfg["tolerances"]
    fam_spec = p["family"]
    family = build_family(fam_spec, cfg["_base"])
    region = build_region(cfg["grid"], fam_spec)
    mode = p.get("mode", "euclidean")
    res = modulus(family, region, mode, tol=tol["kkt"], method=p.get("method", "active-set"))
    expected = p.get("expected")
    if expected == "ring":
        if fam_spec["type"] != "annulus":
            raise ValueError("expected='ring' needs an annulus family")
        expected = ring_modulus(fam_spec["r"], fam_spec["R"])
    adm = admissibility_check(family, res.density, mode, tol["admissibility"])
    ok = _expected_ok(res.value, expected, tol["rel"])
    passed = bool(res.converged and adm.admissible and ok)
    record = {"kind": "modulus", "family": family.label, "mode": mode, "grid": list(region.shape),
              "value": res.value, "iterations": res.iterations, "kkt_residual": res.kkt_residual,
              "converged": res.converged, "min_integral": adm.min_integral, "expected": expected,
              "rel_error": None if expected is None else (res.value - expected) / expected,
              "tolerances": tol, "passed": passed}
    detail = f"expected={expected:.6g} rel_tol={tol['rel']:g}" if expected is not None else \
        f"kkt={res.kkt_residual:.2e}"
    return Outcome("value", res.value, passed, detail, record,
                   raster=(region, res.density.values))


def run_poletsky(cfg, workers=1):
    p = cfg["parameters"]
    tol = cfg["tolerances"]
    fam_spec = p["family"]
    family = build_family(fam_spec, cfg["_base"])
    region = build_region(cfg["grid"], fam_spec)
    mode = p.get("mode", "euclidean")
    ms = map_from_config(p["map"], region)
    rho = None
    if p.get("density", "optimal") == "extremal":
        if fam_spec["type"] != "annulus":
            raise ValueError("density='extremal' needs an annulus family")
        rho = annulus_extremal_density(region, fam_spec["r"], fam_spec["R"], mode,
                                       _pt(fam_spec.get("center", [0, 0])))
        low = admissibility_check(family, rho, mode).min_integral
        if low < 1.0:
            rho = rho.scaled(1.0 / low)
    rep = poletsky_verify(ms, family, region, rho=rho, mode=mode, rel_tol=tol["rel"],
                          workers=workers, solver_tol=tol["kkt"])
    exp = p.get("expected", {})
    checks = {side: _expected_ok(getattr(rep, side), exp.get(side), tol["expected"])
              for side in ("lhs", "rhs")}
    passed = bool(rep.passed and all(checks.values()))
    record = {"kind": "poletsky", **rep.to_dict(), "expected": exp, "expected_ok": checks,
              "grid": list(region.shape), "tolerances": tol, "passed": passed}
    return Outcome("margin", rep.margin, passed,
                   f"lhs={rep.lhs:.6g} rhs={rep.rhs:.6g} rel_tol={tol['rel']:g}", record,
                   raster=(region, dilatation(ms).K))


def build_scalar_field(spec, region, p0):
    kind = spec["type"]
    if kind == "constant":
        return ScalarField.from_function(region, lambda z: np.full(z.shape, spec["value"]))
    if kind == "half_plane":
        # indicator of one side of the geodesic through p0 with the given direction
        to_origin = MobiusTransform.translation(p0).inverse()
        rot = np.exp(-1j * spec.get("angle", 0.0))
        z = region.centers
        vals = np.zeros(region.shape)
        vals[region.mask] = (np.imag(rot * to_origin(z[region.mask])) > 0).astype(float)
        return ScalarField(region, vals)
    if kind == "loglog":
        z0 = _pt(spec["z0"])
        with np.errstate(divide="ignore", invalid="ignore"):
            return ScalarField.from_function(
                region, lambda z: np.log(np.log(1.0 / np.abs(z - z0))))
    return dilatation(map_from_config(spec["map"], region)).as_field("K")


def run_fmo(cfg):
    p = cfg["parameters"]
    tol = cfg["tolerances"]
    p0 = _pt(p["p0"])
    region = build_region(cfg["grid"], default_n=256)
    field = build_scalar_field(p["field"], region, p0)
    seq = fmo_statistic(field, p0, p["radii"])
    osc = np.array([o for _, o in seq])
    finite = bool(np.all(np.isfinite(osc)))
    ok_exp = all(_expected_ok(o, p.get("expected"), tol["expected"]) for o in osc)
    ok_bound = "bound" not in p or bool(np.all(osc <= p["bound"]))
    passed = finite and ok_exp and ok_bound
    peak = float(np.max(osc))
    record = {"kind": "fmo", "p0": _pair(p0), "radii": [e for e, _ in seq],
              "oscillation": osc.tolist(), "max_oscillation": peak,
              "expected": p.get("expected"), "bound": p.get("bound"),
              "tolerances": tol, "passed": passed}
    rows = [["radius", "oscillation"]] + [[e, o] for e, o in seq]
    return Outcome("max_oscillation", peak, passed, f"radii={len(seq)}", record, rows)


RUNNERS = {"metric": run_metric, "orbit": run_orbit, "dirichlet": run_dirichlet,
           "modulus": run_modulus, "poletsky": run_poletsky, "fmo": run_fmo}


# -- output ------------------------------------------------------------------

def _csv_text(rows):
    return "\n".join(",".join(repr(float(x)) if isinstance(x, float) else str(x) for x in r)
                     for r in rows) + "\n"


def write_artifact(outcome, path, fmt):
    """Write the JSON record, or the CSV table/raster plus the record beside it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path.write_text(io.dumps(outcome.record))
        return [path]
    if outcome.raster is not None:
        io.write_raster(path, *outcome.raster)
    else:
        path.write_text(_csv_text(outcome.csv_rows))
    sidecar = path.with_suffix(".summary.json")
    sidecar.write_text(io.dumps(outcome.record))
    return [path, sidecar]


def _workers(cfg):
    want = cfg.get("workers", 2)
    cap = os.environ.get("MODLAB_THREADS")
    if cap:
        want = min(want, max(1, int(cap)))
    return want


def run(kind, cfg, out=None):
    """Run a validated config; write the artifact and return ``(exit_status, summary)``."""
    runner = RUNNERS[kind]
    outcome = runner(cfg, _workers(cfg)) if kind == "poletsky" else runner(cfg)
    fmt = cfg["output"].get("format", "json")
    path = out or cfg["output"].get("path") or f"{kind}_result.{fmt}"
    write_artifact(outcome, path, fmt)
    value = f"{outcome.value:.6g}" if isinstance(outcome.value, float) else str(outcome.value)
    summary = (f"{kind}: {outcome.headline}={value} "
               f"check={'PASS' if outcome.passed else 'FAIL'} ({outcome.detail}) -> {path}")
    return (0 if outcome.passed else 2), summary


def build_parser():
    parser = argparse.ArgumentParser(prog="modlab", description=__doc__.splitlines()[0])
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", help="artifact path (overrides output.path)")
    parser.add_argument("--grid", type=int, help="grid resolution (overrides grid.n)")
    parser.add_argument("--seed", type=int, help="random seed (overrides seed)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.kind)
        if args.grid is not None:
            if args.grid < 4:
                raise ConfigError("--grid must be at least 4")
            cfg["grid"]["n"] = args.grid
        if args.seed is not None:
            cfg["seed"] = args.seed
        status, summary = run(args.kind, cfg, args.out)
    except (ConfigError, OSError, ValueError, RuntimeError) as exc:
        print(f"modlab {args.kind}: error: {exc}", file=sys.stderr)
        return 1
    print(summary)
    return status


if __name__ == "__main__":
    sys.exit(main())
