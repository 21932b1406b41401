"""Batch command line front end.

Every command reads one or two potential spec files (JSON), computes, and
then writes its outputs into ``--out`` as ``<command>-<label>.<ext>``
together with ``manifest-<command>-<label>.json``. Failures are written to
``error-<command>-<label>.json``.

Exit status: 0 success, 2 invalid input, 3 numerical non-convergence (the
outputs that could be produced are still written and flagged).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import platform
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ResonanceLabError, ValidationError
from .potential import Potential, hypothesis_check, load_spec

COMMANDS = ("det-grid", "resonances", "counting", "born-compare", "indicator", "sigma",
            "uniqueness", "hypotheses")

DEFAULT_REGIONS = {
    "det-grid": "-5:5:-5:-0.1",
    "resonances": "0:6:-3:-0.05",
    "born-compare": "-12:12:-12:-1",
    "uniqueness": "0:6:-4:-0.05",
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one run (file values overridden by flags)."""

    command: str
    potentials: tuple = ()
    region: str | None = None
    radii: tuple = ()
    resolution: tuple = (41, 41)
    tol: float = 1e-10
    out: str = "."
    svg: bool = False
    threads: int = 1
    seed: int = 0
    method: str = "jost"
    t_values: tuple = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
    label: str | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        need = 2 if self.command == "uniqueness" else 1
        if len(self.potentials) != need:
            raise ValidationError(f"{self.command} takes exactly {need} --potential file(s)")
        for p in self.potentials:
            if not Path(p).is_file():
                raise ValidationError(f"potential file not found: {p}")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ValidationError("tolerance must be positive")
        if self.threads < 1:
            raise ValidationError("--threads must be at least 1")
        if any(not (r > 0) for r in self.radii) or list(self.radii) != sorted(set(self.radii)):
            raise ValidationError("radii must be positive and strictly ascending")
        if self.method not in ("jost", "nystrom"):
            raise ValidationError("--method must be jost or nystrom")
        if self.region is not None:
            from .rootfinder import ContourRegion
            ContourRegion.parse(self.region)
        out = Path(self.out)
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise ValidationError(f"output directory not writable: {out}")
        return self

    def region_for(self, command: str) -> str:
        return self.region or DEFAULT_REGIONS[command]


# ---------------------------------------------------------------------------
# argument handling


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise ValidationError(f"not a comma separated list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resonancelab",
                                description="Resonances of 1D Schroedinger operators via Fredholm determinants.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--potential", action="append", help="potential spec file (JSON); repeat for pairwise commands")
    p.add_argument("--region", help="rectangle re_min:re_max:im_min:im_max")
    p.add_argument("--radii", help="comma separated radii (counting) or radius ladder (indicator)")
    p.add_argument("--resolution", help="det-grid sample counts nx,ny")
    p.add_argument("--tol", type=float)
    p.add_argument("--out", help="output directory")
    p.add_argument("--svg", action="store_true", default=None, help="also write an SVG scatter")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--method", help="determinant evaluation: jost (transfer march) or nystrom")
    p.add_argument("--t-values", dest="t_values", help="comma separated t for sigma")
    p.add_argument("--label", help="label used in output names")
    p.add_argument("--config", help="JSON file with any of the above keys; flags win")
    return p


_VALUE_FLAGS = ("--region", "--radii", "--t-values")


def resolve_config(argv=None) -> RunConfig:
    """Merge the optional config file with command line flags."""
    argv = list(sys.argv[1:] if argv is None else argv)
    # values such as -5:5:-5:-0.1 start with a dash; bind them to their flag
    for i in range(len(argv) - 1, 0, -1):
        if argv[i - 1] in _VALUE_FLAGS and argv[i].startswith("-") and argv[i][1:2].isdigit():
            argv[i - 1:i + 1] = [f"{argv[i - 1]}={argv[i]}"]
    ns = build_parser().parse_args(argv)
    merged: dict = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                merged = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {ns.config}: {exc}") from None
        if not isinstance(merged, dict):
            raise ValidationError("config file must hold a JSON object")
    flags = {k: v for k, v in vars(ns).items() if v is not None and k != "config"}
    if "potential" in flags:
        flags["potentials"] = flags.pop("potential")
    merged.update(flags)
    if "potential" in merged:
        pot = merged.pop("potential")
        merged.setdefault("potentials", [pot] if isinstance(pot, str) else pot)
    known = set(RunConfig.__dataclass_fields__)
    unknown = sorted(set(merged) - known)
    if unknown:
        raise ValidationError(f"unknown config keys: {unknown}")
    for key in ("radii", "t_values"):
        if isinstance(merged.get(key), str):
            merged[key] = _float_list(merged[key])
    if isinstance(merged.get("resolution"), str):
        merged["resolution"] = tuple(int(v) for v in _float_list(merged["resolution"]))
    for key in ("potentials", "radii", "resolution", "t_values"):
        if key in merged:
            merged[key] = tuple(merged[key])
    try:
        cfg = RunConfig(**merged)
    except TypeError as exc:
        raise ValidationError(str(exc)) from None
    return cfg


def _label(cfg: RunConfig, specs) -> str:
    if cfg.label:
        raw = cfg.label
    else:
        names = [s.label or Path(p).stem for s, p in zip(specs, cfg.potentials)]
        raw = "-vs-".join(names)
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", raw) or "run"


# ---------------------------------------------------------------------------
# writers


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"not serializable: {type(obj)}")


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# commands; each returns (files, flags)


def _det_fn(spec: Potential, method: str, tol: float):
    from .determinant import determinant
    from .jost import jost_function
    if method == "jost":
        return jost_function(spec)
    return lambda k: determinant(spec, k, tol=min(tol, 1e-10), n_max=512).D


def _cmd_det_grid(cfg, specs, stem, out):
    from .determinant import det_grid, write_grid_csv
    g = det_grid(specs[0], cfg.region_for("det-grid"), cfg.resolution, tol=max(cfg.tol, 1e-12),
                 method=cfg.method, threads=cfg.threads)
    path = out / f"{stem}.csv"
    write_grid_csv(g, path)
    bad = sum(1 for row in g.values for v in row if v is not None and not v.converged)
    return [path], ([f"{bad} grid values above tolerance"] if bad else [])


def _svg(resonances, born, path):
    from .asymptotics import scatter_svg
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scatter_svg(resonances, born))


def _cmd_resonances(cfg, specs, stem, out):
    from .rootfinder import find_zeros
    spec = specs[0]
    rs = find_zeros(_det_fn(spec, cfg.method, cfg.tol), cfg.region_for("resonances"), cfg.tol,
                    method="fredholm")
    path = out / f"{stem}.json"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(rs.to_json())
        fh.write("\n")
    files = [path]
    if cfg.svg:
        files.append(out / f"{stem}.svg")
        _svg(rs.locations, (), files[-1])
    flags = [f"unconverged zero near {z.location}" for z in rs.zeros if not z.converged]
    return files, flags


def _cmd_counting(cfg, specs, stem, out):
    from .asymptotics import counting_law_compare, write_counting_csv
    radii = cfg.radii or (6.0, 9.0, 12.0)
    rep = counting_law_compare(specs[0], radii, tol=cfg.tol)
    csv_path, js = out / f"{stem}.csv", out / f"{stem}.json"
    write_counting_csv(rep, csv_path)
    _write_json(js, rep.to_dict())
    files = [csv_path, js]
    if cfg.svg:
        files.append(out / f"{stem}.svg")
        _svg([z.location for z in rep.zeros], (), files[-1])
    flags = [f for f in rep.flags if f == "unconverged_zeros"]
    return files, flags


def _cmd_born(cfg, specs, stem, out):
    from .asymptotics import born_zero_compare
    cmp_ = born_zero_compare(specs[0], cfg.region_for("born-compare"), tol=cfg.tol)
    path = out / f"{stem}.json"
    _write_json(path, cmp_.to_dict())
    files = [path]
    if cfg.svg:
        files.append(out / f"{stem}.svg")
        _svg(cmp_.resonances, cmp_.born_zeros, files[-1])
    flags = [] if cmp_.injective else ["born pairing not injective"]
    return files, flags


def _cmd_indicator(cfg, specs, stem, out):
    from .asymptotics import indicator_of_D, write_indicator_csv
    ladder = cfg.radii or None
    est = indicator_of_D(specs[0], radius_ladder=ladder)
    path = out / f"{stem}.csv"
    write_indicator_csv(est, path)
    # ladder notes stay in the CSV; they are not a convergence failure
    return [path], []


def _cmd_sigma(cfg, specs, stem, out):
    from .asymptotics import sigma_integral
    rows = [(float(t), sigma_integral(specs[0], float(t))) for t in cfg.t_values]
    path = out / f"{stem}.csv"
    _write_rows(path, ["t", "sigma"], rows)
    return [path], []


def _cmd_uniqueness(cfg, specs, stem, out):
    from .asymptotics import uniqueness_compare
    rep = uniqueness_compare(specs[0], specs[1], cfg.region_for("uniqueness"), tol=cfg.tol,
                             method=cfg.method)
    path = out / f"{stem}.json"
    _write_json(path, rep.to_dict())
    return [path], []


def _cmd_hypotheses(cfg, specs, stem, out):
    rep = hypothesis_check(specs[0], seed=cfg.seed)
    path = out / f"{stem}.json"
    _write_json(path, rep.to_dict())
    return [path], []


_DISPATCH = {
    "det-grid": _cmd_det_grid,
    "resonances": _cmd_resonances,
    "counting": _cmd_counting,
    "born-compare": _cmd_born,
    "indicator": _cmd_indicator,
    "sigma": _cmd_sigma,
    "uniqueness": _cmd_uniqueness,
    "hypotheses": _cmd_hypotheses,
}


# ---------------------------------------------------------------------------
# driver


@dataclass
class RunResult:
    status: int
    files: list = field(default_factory=list)
    manifest: Path | None = None
    error: dict | None = None


def run(cfg: RunConfig) -> RunResult:
    """Execute one configured command; never raises for package errors."""
    t0 = time.perf_counter()
    out = Path(cfg.out)
    stem = f"{cfg.command}-run"
    try:
        cfg = cfg.validate()
        specs = [load_spec(p) for p in cfg.potentials]
        stem = f"{cfg.command}-{_label(cfg, specs)}"
        files, flags = _DISPATCH[cfg.command](cfg, specs, stem, out)
        status = 3 if flags else 0
        error = None
    except ResonanceLabError as exc:
        files, flags = [], []
        status = exc.exit_code if exc.exit_code in (2, 3) else 3
        error = exc.record()
    except (OSError, ValueError) as exc:
        files, flags = [], []
        status = 2
        error = {"kind": "validation", "message": str(exc)}
    if error is not None or flags:
        rec = error or {"kind": "numerical", "message": "partial result", "flags": flags}
        out.mkdir(parents=True, exist_ok=True)
        err_path = out / f"error-{stem}.json"
        _write_json(err_path, {"command": cfg.command, "status": status, **rec})
        files = list(files) + [err_path]
    manifest = {
        "config": asdict(cfg),
        "tool": "resonancelab",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "status": status,
        "partial": status != 0,
        "flags": flags,
        "wall_time_s": time.perf_counter() - t0,
        "files": [{"name": Path(f).name, "sha256": _sha256(Path(f))} for f in files],
    }
    mpath = None
    if out.is_dir():
        mpath = out / f"manifest-{stem}.json"
        _write_json(mpath, manifest)
    return RunResult(status, [Path(f) for f in files], mpath, error)


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    res = run(cfg)
    for f in res.files:
        print(f)
    if res.error:
        print(f"error: {res.error.get('message')}", file=sys.stderr)
    return res.status


if __name__ == "__main__":
    sys.exit(main())
