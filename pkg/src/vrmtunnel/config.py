"""Run configuration: an INI document with one section per concern.

Sections and keys (all lengths in bohr, energies in hartree)::

    [profile]   kind = linear | exponential | parabolic | bell | eckart | sampled
                plus the family parameters:
                  linear: v0, B        exponential: v0, a
                  parabolic: v0, B, x0 bell: v0, x0
                  eckart: A, B, x0     sampled: knots = x:V, x:V, ...
    [setup]     a, b, v1, v3     (v1 may be "at-a", v3 may be "at-b": take V at the edge)
    [basis]     start, step, end  or  kappas = k1, k2, ...
    [solver]    lambda_b, lambda_b_tilde, quad_tol, rcond
    [energy]    start, step, end  or  values = E1, E2, ...
    [oracle]    enabled (yes/no), tol
    [output]    dir, name

A document only needs ``[profile] kind``; every other key falls back to
the bundled default document of that family (``dump-config <kind>``).
Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from importlib import resources

from .basis import BasisSet, kappa_grid
from .errors import ConfigError, TunnelingError
from .potentials import PROFILE_KINDS, ScatteringSetup, evaluate, make_profile

__all__ = ["RunConfig", "parse_config", "load_config", "default_config_text", "CATALOG"]

CATALOG = ("linear", "exponential", "parabolic", "bell", "eckart")

_PROFILE_KEYS = {
    "linear": ("v0", "B"),
    "exponential": ("v0", "a"),
    "parabolic": ("v0", "B", "x0"),
    "bell": ("v0", "x0"),
    "eckart": ("A", "B", "x0"),
    "sampled": ("knots",),
}

_SECTIONS = {
    "profile": None,  # checked per kind
    "setup": {"a", "b", "v1", "v3"},
    "basis": {"start", "step", "end", "kappas"},
    "solver": {"lambda_b", "lambda_b_tilde", "quad_tol", "rcond"},
    "energy": {"start", "step", "end", "values"},
    "oracle": {"enabled", "tol"},
    "output": {"dir", "name"},
}


@dataclass(frozen=True)
class RunConfig:
    profile: object
    a: float
    b: float
    v1: float
    v3: float
    v1_mode: str
    v3_mode: str
    kappas: tuple[float, ...]
    lambda_b: float
    lambda_b_tilde: float
    energies: tuple[float, ...]
    quad_tol: float = 1e-10
    rcond: float = 1e-13
    oracle: bool = True
    oracle_tol: float = 1e-10
    out_dir: str = "out"
    name: str = "run"

    @property
    def basis(self) -> BasisSet:
        return BasisSet(self.kappas, (self.a, self.b))

    def setup(self, E: float) -> ScatteringSetup:
        return ScatteringSetup(self.a, self.b, self.v1, self.v3, E)

    def replace(self, **changes) -> "RunConfig":
        from dataclasses import replace

        return replace(self, **changes)


def default_config_text(kind: str) -> str:
    """The bundled default document for a catalog family."""
    name = "linear" if kind == "linear" else kind
    try:
        return resources.files("vrmtunnel").joinpath(f"data/configs/{name}.ini").read_text()
    except FileNotFoundError:
        raise ConfigError(f"no default configuration for profile {kind!r}", field="profile.kind") from None


def _reader():
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), comment_prefixes=("#", ";")
    )
    parser.optionxform = str  # family parameters are case sensitive (A, B)
    return parser


def _read(text: str, source: str):
    parser = _reader()
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"line {exc.lineno}: key outside any section", line=exc.lineno) from exc
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(f"line {exc.lineno}: {exc.message}", line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"line {line}: cannot parse {exc.errors[0][1]!r}", line=line) from exc
    return parser


def _float(raw, field):
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{field}: expected a number, got {raw!r}", field=field) from None
    if not math.isfinite(value):
        raise ConfigError(f"{field}: must be finite", field=field)
    return value


def _float_list(raw, field):
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"{field}: empty list", field=field)
    return tuple(_float(s, field) for s in items)


def _bool(raw, field):
    low = raw.strip().lower()
    if low in ("yes", "true", "on", "1"):
        return True
    if low in ("no", "false", "off", "0"):
        return False
    raise ConfigError(f"{field}: expected yes/no, got {raw!r}", field=field)


def _grid(section: dict, prefix: str, list_key: str):
    if list_key in section and any(k in section for k in ("start", "step", "end")):
        raise ConfigError(
            f"{prefix}: give either {list_key} or start/step/end, not both", field=f"{prefix}.{list_key}"
        )
    if list_key in section:
        return _float_list(section[list_key], f"{prefix}.{list_key}")
    for key in ("start", "step", "end"):
        if key not in section:
            raise ConfigError(f"{prefix}.{key}: missing", field=f"{prefix}.{key}")
    start = _float(section["start"], f"{prefix}.start")
    step = _float(section["step"], f"{prefix}.step")
    end = _float(section["end"], f"{prefix}.end")
    if not step > 0:
        raise ConfigError(f"{prefix}.step: must be positive, got {step}", field=f"{prefix}.step")
    if start > end:
        raise ConfigError(f"{prefix}.start: exceeds {prefix}.end", field=f"{prefix}.start")
    return tuple(kappa_grid(start, step, end))


def _profile(section: dict):
    kind = section.get("kind")
    if kind not in PROFILE_KINDS:
        raise ConfigError(
            f"profile.kind: expected one of {sorted(PROFILE_KINDS)}, got {kind!r}", field="profile.kind"
        )
    allowed = _PROFILE_KEYS[kind]
    for key in section:
        if key != "kind" and key not in allowed:
            raise ConfigError(f"profile.{key}: unknown key for a {kind} profile", field=f"profile.{key}")
    params = {}
    for key in allowed:
        if key not in section:
            raise ConfigError(f"profile.{key}: missing", field=f"profile.{key}")
        if key == "knots":
            pairs = []
            for item in section[key].split(","):
                try:
                    x, v = item.split(":")
                except ValueError:
                    raise ConfigError(f"profile.knots: expected x:V pairs, got {item!r}", field="profile.knots") from None
                pairs.append((_float(x, "profile.knots"), _float(v, "profile.knots")))
            params[key] = tuple(pairs)
        else:
            params[key] = _float(section[key], f"profile.{key}")
    try:
        return make_profile(kind, **params)
    except TunnelingError as exc:
        raise ConfigError(f"profile: {exc}", field="profile") from exc


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and fully validate a configuration document."""
    user = _read(text, source)
    for name in user.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"{name}: unknown section", field=name)
        allowed = _SECTIONS[name]
        if allowed is not None:
            for key in user[name]:
                if key not in allowed:
                    raise ConfigError(f"{name}.{key}: unknown key", field=f"{name}.{key}")
    if not user.has_option("profile", "kind"):
        raise ConfigError("profile.kind: missing", field="profile.kind")
    kind = user["profile"]["kind"]

    merged = {name: {} for name in _SECTIONS}
    if kind in CATALOG:
        base = _read(default_config_text(kind), f"<default {kind}>")
        for name in base.sections():
            merged[name].update(base[name])
    if "kind" in merged["profile"] and merged["profile"]["kind"] != kind:
        merged["profile"] = {}
    for name in user.sections():
        sec = dict(user[name])
        # a user-supplied list replaces a default grid and vice versa
        if name in ("basis", "energy"):
            list_key = "kappas" if name == "basis" else "values"
            if list_key in sec:
                for k in ("start", "step", "end"):
                    merged[name].pop(k, None)
            elif any(k in sec for k in ("start", "step", "end")):
                merged[name].pop(list_key, None)
        merged[name].update(sec)
    return _validate(merged)


def _validate(cfg: dict) -> RunConfig:
    profile = _profile(cfg["profile"])
    setup = cfg["setup"]
    for key in ("a", "b", "v1", "v3"):
        if key not in setup:
            raise ConfigError(f"setup.{key}: missing", field=f"setup.{key}")
    a = _float(setup["a"], "setup.a")
    b = _float(setup["b"], "setup.b")
    if not a < b:
        raise ConfigError("setup.b: must exceed setup.a", field="setup.b")

    def outer(key, edge_word, x):
        raw = setup[key].strip()
        if raw == edge_word:
            try:
                return float(evaluate(profile, x)), raw
            except TunnelingError as exc:
                raise ConfigError(f"setup.{key}: {exc}", field=f"setup.{key}") from exc
        return _float(raw, f"setup.{key}"), "explicit"

    v1, v1_mode = outer("v1", "at-a", a)
    v3, v3_mode = outer("v3", "at-b", b)

    kappas = _grid(cfg["basis"], "basis", "kappas")
    try:
        BasisSet(kappas, (a, b))
    except TunnelingError as exc:
        raise ConfigError(f"basis: {exc}", field="basis") from exc

    solver = cfg["solver"]
    for key in ("lambda_b", "lambda_b_tilde"):
        if key not in solver:
            raise ConfigError(f"solver.{key}: missing", field=f"solver.{key}")
    lam = _float(solver["lambda_b"], "solver.lambda_b")
    lam_t = _float(solver["lambda_b_tilde"], "solver.lambda_b_tilde")
    if lam == lam_t:
        raise ConfigError("solver.lambda_b_tilde: must differ from solver.lambda_b", field="solver.lambda_b_tilde")
    quad_tol = _float(solver.get("quad_tol", "1e-10"), "solver.quad_tol")
    if not quad_tol > 0:
        raise ConfigError("solver.quad_tol: must be positive", field="solver.quad_tol")
    rcond = _float(solver.get("rcond", "1e-13"), "solver.rcond")
    if not 0 <= rcond < 1:
        raise ConfigError("solver.rcond: must lie in [0, 1)", field="solver.rcond")

    energies = tuple(sorted(_grid(cfg["energy"], "energy", "values")))
    for E in energies:
        if not (E > v1 and E > v3):
            raise ConfigError(
                f"energy: E={E} must exceed v1={v1:.6g} and v3={v3:.6g}", field="energy"
            )

    oracle = cfg["oracle"]
    enabled = _bool(oracle.get("enabled", "yes"), "oracle.enabled")
    oracle_tol = _float(oracle.get("tol", "1e-10"), "oracle.tol")
    if not oracle_tol >= 1e-12:
        raise ConfigError("oracle.tol: must be >= 1e-12", field="oracle.tol")

    output = cfg["output"]
    return RunConfig(
        profile=profile,
        a=a,
        b=b,
        v1=v1,
        v3=v3,
        v1_mode=v1_mode,
        v3_mode=v3_mode,
        kappas=kappas,
        lambda_b=lam,
        lambda_b_tilde=lam_t,
        energies=energies,
        quad_tol=quad_tol,
        rcond=rcond,
        oracle=enabled,
        oracle_tol=oracle_tol,
        out_dir=output.get("dir", "out"),
        name=output.get("name", profile.kind),
    )


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read(), source=str(path))
