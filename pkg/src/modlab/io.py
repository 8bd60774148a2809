"""File formats: grid headers, rasters, curves, families, map samples, results.

Floats are written with ``repr`` so every format round-trips exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .curves import Curve
from .fields import DensityField, ScalarField
from .hyperbolic import GridRegion
from .mapping import DilatationField, MapSample
from .modulus import CurveFamily

RASTER_MAGIC = "# modlab-raster v1"


def _bitmap(mask):
    return "".join("1" if b else "0" for b in np.asarray(mask, dtype=bool).ravel())


def _unbitmap(text, shape):
    if len(text) != shape[0] * shape[1] or set(text) - {"0", "1"}:
        raise ValueError("mask bitmap does not match the grid shape")
    return (np.frombuffer(text.encode(), dtype=np.uint8) == ord("1")).reshape(shape)


def region_to_dict(region: GridRegion):
    return {"bounds": list(region.bounds), "cell_size": region.cell_size,
            "shape": list(region.shape), "mask": _bitmap(region.mask)}


def region_from_dict(d) -> GridRegion:
    xmin, _, ymin, _ = d["bounds"]
    shape = tuple(d["shape"])
    mask = _unbitmap(d["mask"], shape) if "mask" in d else np.ones(shape, dtype=bool)
    return GridRegion(float(xmin), float(ymin), float(d["cell_size"]), mask)


def region_to_json(region):
    return json.dumps(region_to_dict(region), sort_keys=True)


def region_from_json(text):
    return region_from_dict(json.loads(text))


# -- rasters -----------------------------------------------------------------

def _field_values(field, component):
    if isinstance(field, (DensityField, ScalarField)):
        return field.region, field.values
    if isinstance(field, DilatationField):
        return field.region, getattr(field, component)
    raise TypeError(f"cannot rasterize {type(field).__name__}")


def write_raster(path, region, values):
    """Row-major CSV under a header carrying bounds, cell size, shape and mask."""
    values = np.asarray(values, dtype=float)
    if values.shape != region.shape:
        raise ValueError("raster values do not match the grid shape")
    xmin, xmax, ymin, ymax = region.bounds
    lines = [RASTER_MAGIC,
             f"# bounds={xmin!r},{xmax!r},{ymin!r},{ymax!r}",
             f"# cell_size={region.cell_size!r}",
             f"# shape={region.ny},{region.nx}",
             f"# mask={_bitmap(region.mask)}"]
    lines.extend(",".join(map(repr, row.tolist())) for row in values)
    Path(path).write_text("\n".join(lines) + "\n")


def emit_raster(field, path, component="K"):
    """Write a density, scalar or dilatation field (``component`` of the latter)."""
    region, values = _field_values(field, component)
    write_raster(path, region, values)


def read_raster(path):
    """Inverse of :func:`write_raster`: returns ``(region, values)``."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != RASTER_MAGIC:
        raise ValueError(f"{path}: not a modlab raster")
    header = {}
    k = 1
    while k < len(lines) and lines[k].startswith("# "):
        key, _, val = lines[k][2:].partition("=")
        header[key] = val
        k += 1
    bounds = [float(x) for x in header["bounds"].split(",")]
    shape = tuple(int(x) for x in header["shape"].split(","))
    region = GridRegion(bounds[0], bounds[2], float(header["cell_size"]),
                        _unbitmap(header["mask"], shape))
    values = np.array([[float(x) for x in row.split(",")] for row in lines[k:k + shape[0]]])
    if values.shape != shape:
        raise ValueError(f"{path}: raster body does not match shape {shape}")
    return region, values


def read_density(path) -> DensityField:
    region, values = read_raster(path)
    return DensityField(region, values)


# -- curves and families -----------------------------------------------------

def write_curve_csv(curve: Curve, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im"])
        for z in curve.vertices:
            w.writerow([repr(float(z.real)), repr(float(z.imag))])


def read_curve_csv(path, closed=False) -> Curve:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] == ["re", "im"]:
        rows = rows[1:]
    return Curve(np.array([complex(float(a), float(b)) for a, b in rows]), closed)


def family_to_list(family: CurveFamily):
    return [[[float(z.real), float(z.imag)] for z in c.vertices] for c in family.curves]


def family_from_list(data, label="") -> CurveFamily:
    return CurveFamily(tuple(Curve(np.array([complex(x, y) for x, y in c])) for c in data), label)


def write_family_json(family: CurveFamily, path):
    Path(path).write_text(json.dumps({"label": family.label, "curves": family_to_list(family)}))


def read_family_json(path) -> CurveFamily:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        return family_from_list(data["curves"], data.get("label", ""))
    return family_from_list(data)


def write_family_dir(family: CurveFamily, directory):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for k, c in enumerate(family.curves):
        write_curve_csv(c, d / f"curve_{k:05d}.csv")


def read_family_dir(directory, label="") -> CurveFamily:
    files = sorted(Path(directory).glob("*.csv"))
    return CurveFamily(tuple(read_curve_csv(f) for f in files), label or Path(directory).name)


# -- map samples ---------------------------------------------------------------

MAP_COLUMNS = ["f_re", "f_im", "fz_re", "fz_im", "fzbar_re", "fzbar_im"]


def write_map_sample_csv(ms: MapSample, path):
    """Header as for rasters, then one row per cell (row-major) of f, fz, fzbar."""
    region = ms.region
    xmin, xmax, ymin, ymax = region.bounds
    lines = [RASTER_MAGIC,
             f"# bounds={xmin!r},{xmax!r},{ymin!r},{ymax!r}",
             f"# cell_size={region.cell_size!r}",
             f"# shape={region.ny},{region.nx}",
             f"# mask={_bitmap(region.mask)}",
             ",".join(MAP_COLUMNS)]
    cols = np.stack([ms.f_values.real.ravel(), ms.f_values.imag.ravel(), ms.fz.real.ravel(),
                     ms.fz.imag.ravel(), ms.fzbar.real.ravel(), ms.fzbar.imag.ravel()], axis=1)
    lines.extend(",".join(map(repr, row.tolist())) for row in cols)
    Path(path).write_text("\n".join(lines) + "\n")


def read_map_sample_csv(path) -> MapSample:
    """Ingest a tabulated map; with only ``f_re, f_im`` columns derivatives are differenced."""
    lines = Path(path).read_text().splitlines()
    header = {}
    k = 1 if lines and lines[0] == RASTER_MAGIC else 0
    while k < len(lines) and lines[k].startswith("# "):
        key, _, val = lines[k][2:].partition("=")
        header[key] = val
        k += 1
    bounds = [float(x) for x in header["bounds"].split(",")]
    shape = tuple(int(x) for x in header["shape"].split(","))
    mask = _unbitmap(header["mask"], shape) if "mask" in header else np.ones(shape, dtype=bool)
    region = GridRegion(bounds[0], bounds[2], float(header["cell_size"]), mask)
    names = lines[k].split(",")
    body = np.array([[float(x) for x in row.split(",")] for row in lines[k + 1:] if row])
    col = {n: body[:, i].reshape(shape) for i, n in enumerate(names)}
    f = col["f_re"] + 1j * col["f_im"]
    if "fz_re" not in col:
        return MapSample.from_values(region, f)
    return MapSample(region, f, col["fz_re"] + 1j * col["fz_im"],
                     col["fzbar_re"] + 1j * col["fzbar_im"], "tabulated")


def dumps(obj):
    """Deterministic JSON text used for every emitted artifact."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"
