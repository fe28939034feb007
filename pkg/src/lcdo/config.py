"""Run configuration: text format, validation and canonical printing.

The config format is plain UTF-8 ``section.key = value`` lines with ``#``
comments.  Unknown or duplicated keys are hard errors: a silently ignored
typo in lambda or q0 would invalidate the physics without a trace.

Value grammar for the two structured keys:

  init.shape     ball:R | ball:R@cx,cy,cz | ellipsoid:a,b,c[@cx,cy,cz] | random-blob
  init.director  uniform:z | uniform:ax,ay,az | hedgehog | twist:q | random
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .elastic import ElasticConstants, EricksenError, SurfaceParams, validate_ericksen_closed
from .energy import DiffuseParams
from .grid import GridSpec
from .initialize import DirectorInit, ShapeInit
from .optimize import Schedule

__all__ = ["RunConfig", "ConfigError", "parse_config", "parse_config_text", "print_config", "load_config"]


class ConfigError(ValueError):
    """Malformed configuration text or inadmissible parameter combination."""


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    elastic: ElasticConstants
    surface: SurfaceParams
    m: float
    diffuse: DiffuseParams
    schedule: Schedule
    seed: int
    shape: ShapeInit
    director: DirectorInit

    def warnings(self) -> list[str]:
        notes = []
        if not self.surface.convexity_safe:
            notes.append(
                f"lambda = {self.surface.lam} lies outside the convexity-safe range "
                "[-0.5, 1]; minimizer guarantees do not apply"
            )
        return notes


def _parse_floats(text: str, count: int | None = None) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc
    if count is not None and len(vals) != count:
        raise ConfigError(f"expected {count} numbers, got {len(vals)} in {text!r}")
    return vals


def _parse_shape(text: str) -> ShapeInit:
    body = text.strip()
    if body == "random-blob":
        return ShapeInit("random-blob")
    if body.startswith("ball:"):
        rest = body[len("ball:"):]
        center = None
        if "@" in rest:
            rest, center_txt = rest.split("@", 1)
            center = _parse_floats(center_txt, 3)
        (radius,) = _parse_floats(rest, 1)
        return ShapeInit("ball", radius=radius, center=center)
    if body.startswith("ellipsoid:"):
        rest = body[len("ellipsoid:"):]
        center = None
        if "@" in rest:
            rest, center_txt = rest.split("@", 1)
            center = _parse_floats(center_txt, 3)
        axes = _parse_floats(rest, 3)
        return ShapeInit("ellipsoid", semi_axes=axes, center=center)
    raise ConfigError(f"unknown init.shape {text!r}")


def _print_shape(s: ShapeInit) -> str:
    if s.kind == "random-blob":
        return "random-blob"
    if s.kind == "ball":
        base = f"ball:{s.radius!r}"
    else:
        base = "ellipsoid:" + ",".join(repr(a) for a in s.semi_axes)
    if s.center is not None:
        base += "@" + ",".join(repr(c) for c in s.center)
    return base


_AXIS_NAMES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


def _parse_director(text: str) -> DirectorInit:
    body = text.strip()
    if body == "hedgehog":
        return DirectorInit("hedgehog")
    if body == "random":
        return DirectorInit("random")
    if body.startswith("uniform:"):
        rest = body[len("uniform:"):].strip()
        if rest in _AXIS_NAMES:
            return DirectorInit("uniform", axis=_AXIS_NAMES[rest])
        return DirectorInit("uniform", axis=_parse_floats(rest, 3))
    if body.startswith("twist:"):
        (q,) = _parse_floats(body[len("twist:"):], 1)
        return DirectorInit("twist", q=q)
    raise ConfigError(f"unknown init.director {text!r}")


def _print_director(d: DirectorInit) -> str:
    if d.kind in ("hedgehog", "random"):
        return d.kind
    if d.kind == "twist":
        return f"twist:{d.q!r}"
    return "uniform:" + ",".join(repr(a) for a in d.axis)


_INT_KEYS = {
    "grid.nx", "grid.ny", "grid.nz", "opt.max_outer_iters", "opt.director_substeps", "run.seed",
}
_FLOAT_KEYS = {
    "grid.lx", "grid.ly", "grid.lz",
    "elastic.k11", "elastic.k22", "elastic.k33", "elastic.k24", "elastic.q0",
    "surface.gamma", "surface.lambda",
    "constraint.m",
    "diffuse.eps_phi", "diffuse.eps_v", "diffuse.eta",
    "opt.tol_rel_energy", "opt.backtrack",
}
_OPTIONAL_FLOAT_KEYS = {"opt.tau_n", "opt.tau_phi", "opt.tau_v"}
_LIST_KEYS = {"opt.eps_ladder", "opt.rung_iters", "opt.lambda_ladder"}
_STR_KEYS = {"diffuse.inner_anchoring_mode", "run.mode", "init.shape", "init.director"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _OPTIONAL_FLOAT_KEYS | _LIST_KEYS | _STR_KEYS

_REQUIRED = {
    "grid.nx", "grid.ny", "grid.nz", "grid.lx", "grid.ly", "grid.lz",
    "elastic.k11", "elastic.k22", "elastic.k33", "elastic.k24",
    "surface.gamma", "surface.lambda",
    "constraint.m",
    "init.shape", "init.director",
}


def parse_config_text(text: str) -> RunConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    missing = sorted(_REQUIRED - raw.keys())
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    def geti(key: str, default: int | None = None) -> int:
        if key not in raw:
            return default
        try:
            return int(raw[key])
        except ValueError as exc:
            raise ConfigError(f"{key}: expected integer, got {raw[key]!r}") from exc

    def getf(key: str, default: float | None = None) -> float | None:
        if key not in raw:
            return default
        try:
            return float(raw[key])
        except ValueError as exc:
            raise ConfigError(f"{key}: expected number, got {raw[key]!r}") from exc

    def gettau(key: str) -> float | None:
        if key not in raw or raw[key].strip() == "auto":
            return None
        return getf(key)

    try:
        grid = GridSpec(
            nx=geti("grid.nx"), ny=geti("grid.ny"), nz=geti("grid.nz"),
            lx=getf("grid.lx"), ly=getf("grid.ly"), lz=getf("grid.lz"),
        )
        elastic = ElasticConstants(
            k11=getf("elastic.k11"), k22=getf("elastic.k22"),
            k33=getf("elastic.k33"), k24=getf("elastic.k24"),
            q0=getf("elastic.q0", 0.0),
        )
        surface = SurfaceParams(gamma=getf("surface.gamma"), lam=getf("surface.lambda"))
    except ConfigError:
        raise
    except EricksenError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    h = grid.max_spacing
    try:
        diffuse = DiffuseParams(
            eps_phi=getf("diffuse.eps_phi", 2.0 * h),
            eps_v=getf("diffuse.eps_v", 2.0 * h),
            eta=getf("diffuse.eta", 1e-8),
            inner_anchoring_mode=raw.get("diffuse.inner_anchoring_mode", "isotropic-only"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    def getlist_f(key: str) -> tuple[float, ...] | None:
        if key not in raw or raw[key].strip() == "auto":
            return None
        return _parse_floats(raw[key])

    rung_iters = None
    if "opt.rung_iters" in raw and raw["opt.rung_iters"].strip() != "auto":
        try:
            rung_iters = tuple(int(p.strip()) for p in raw["opt.rung_iters"].split(",") if p.strip())
        except ValueError as exc:
            raise ConfigError(f"opt.rung_iters: expected comma-separated integers") from exc

    defaults = Schedule()
    try:
        schedule = Schedule(
            max_outer_iters=geti("opt.max_outer_iters", defaults.max_outer_iters),
            tol_rel_energy=getf("opt.tol_rel_energy", defaults.tol_rel_energy),
            tau_n=gettau("opt.tau_n"),
            tau_phi=gettau("opt.tau_phi"),
            tau_v=gettau("opt.tau_v"),
            backtrack=getf("opt.backtrack", defaults.backtrack),
            director_substeps=geti("opt.director_substeps", defaults.director_substeps),
            eps_ladder=getlist_f("opt.eps_ladder") or defaults.eps_ladder,
            rung_iters=rung_iters,
            mode=raw.get("run.mode", "free"),
            lambda_ladder=getlist_f("opt.lambda_ladder") or defaults.lambda_ladder,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    cfg = RunConfig(
        grid=grid,
        elastic=elastic,
        surface=surface,
        m=getf("constraint.m"),
        diffuse=diffuse,
        schedule=schedule,
        seed=geti("run.seed", 0),
        shape=_parse_shape(raw["init.shape"]),
        director=_parse_director(raw["init.director"]),
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    bad = validate_ericksen_closed(cfg.elastic)
    if bad:
        raise EricksenError("elastic constants are inadmissible: " + ", ".join(bad))
    if not 0.0 < cfg.m < cfg.grid.box_volume:
        raise ConfigError(f"constraint.m = {cfg.m} must lie in (0, box volume = {cfg.grid.box_volume})")
    try:
        cfg.diffuse.check_resolved(cfg.grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    smallest = min(cfg.schedule.eps_ladder)
    if smallest * cfg.diffuse.eps_phi < 2.0 * cfg.grid.max_spacing - 1e-12:
        raise ConfigError("eps ladder drives eps_phi below 2 * max spacing")
    if smallest * cfg.diffuse.eps_v < 2.0 * cfg.grid.max_spacing - 1e-12:
        raise ConfigError("eps ladder drives eps_v below 2 * max spacing")


def parse_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def load_config(path: str, warn_stream=None) -> RunConfig:
    cfg = parse_config(path)
    stream = warn_stream if warn_stream is not None else sys.stderr
    for note in cfg.warnings():
        print(f"warning: {note}", file=stream)
    return cfg


def print_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config_text(print_config(cfg)) == cfg."""
    s = cfg.schedule
    lines = [
        f"grid.nx = {cfg.grid.nx}",
        f"grid.ny = {cfg.grid.ny}",
        f"grid.nz = {cfg.grid.nz}",
        f"grid.lx = {cfg.grid.lx!r}",
        f"grid.ly = {cfg.grid.ly!r}",
        f"grid.lz = {cfg.grid.lz!r}",
        f"elastic.k11 = {cfg.elastic.k11!r}",
        f"elastic.k22 = {cfg.elastic.k22!r}",
        f"elastic.k33 = {cfg.elastic.k33!r}",
        f"elastic.k24 = {cfg.elastic.k24!r}",
        f"elastic.q0 = {cfg.elastic.q0!r}",
        f"surface.gamma = {cfg.surface.gamma!r}",
        f"surface.lambda = {cfg.surface.lam!r}",
        f"constraint.m = {cfg.m!r}",
        f"diffuse.eps_phi = {cfg.diffuse.eps_phi!r}",
        f"diffuse.eps_v = {cfg.diffuse.eps_v!r}",
        f"diffuse.eta = {cfg.diffuse.eta!r}",
        f"diffuse.inner_anchoring_mode = {cfg.diffuse.inner_anchoring_mode}",
        f"opt.max_outer_iters = {s.max_outer_iters}",
        f"opt.tol_rel_energy = {s.tol_rel_energy!r}",
        f"opt.tau_n = {'auto' if s.tau_n is None else repr(s.tau_n)}",
        f"opt.tau_phi = {'auto' if s.tau_phi is None else repr(s.tau_phi)}",
        f"opt.tau_v = {'auto' if s.tau_v is None else repr(s.tau_v)}",
        f"opt.backtrack = {s.backtrack!r}",
        f"opt.director_substeps = {s.director_substeps}",
        "opt.eps_ladder = " + ",".join(repr(x) for x in s.eps_ladder),
        "opt.rung_iters = " + ("auto" if s.rung_iters is None else ",".join(str(x) for x in s.rung_iters)),
        "opt.lambda_ladder = " + ",".join(repr(x) for x in s.lambda_ladder),
        f"run.mode = {s.mode}",
        f"run.seed = {cfg.seed}",
        f"init.shape = {_print_shape(cfg.shape)}",
        f"init.director = {_print_director(cfg.director)}",
    ]
    return "\n".join(lines) + "\n"
