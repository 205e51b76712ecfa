"""Flat ``key = value`` run configuration: parsing, validation, serialization.

One pair per line; ``#`` starts a comment. Lists are comma separated.
Unknown keys, type errors and violated constraints raise
:class:`~lpmhd.errors.ConfigError` naming the key and line.
"""

from dataclasses import dataclass, fields, replace

import numpy as np

from ..errors import ConfigError, DomainError

MODELS = ("euler", "mhd", "hazeltine", "kirchhoff")
QUANTIZED = ("euler", "mhd", "hazeltine")
KIRCHHOFF_PRESETS = ("kirchhoff", "clebsch", "lsk", "custom")


@dataclass(frozen=True)
class RunConfig:
    model: str
    T_final: float
    N: int = 0
    h: float = 0.1
    alpha: float = 0.0
    kirchhoff_preset: str = "kirchhoff"
    kirchhoff_a: tuple = ()
    kirchhoff_b: tuple = ()
    kirchhoff_c: tuple = ()
    seed: int = 0
    L_cut: int = 0
    gamma: float = 2.0
    amplitude: float = 1.0
    output_every: int = 100
    sample_every: int = 1
    grid: tuple = (32, 64)
    fp_tol: float = 1e-13
    fp_max_iters: int = 100
    baseline: bool = False

    @property
    def n_steps(self):
        return int(round(self.T_final / self.h))


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return tuple(_int(x) for x in text.split(",") if x.strip())


def _str(text):
    return text.strip()


PARSERS = {
    "model": _str,
    "T_final": float,
    "N": _int,
    "h": float,
    "alpha": float,
    "kirchhoff_preset": _str,
    "kirchhoff_a": _floats,
    "kirchhoff_b": _floats,
    "kirchhoff_c": _floats,
    "seed": _int,
    "L_cut": _int,
    "gamma": float,
    "amplitude": float,
    "output_every": _int,
    "sample_every": _int,
    "grid": _ints,
    "fp_tol": float,
    "fp_max_iters": _int,
    "baseline": _bool,
}


def parse_config(text):
    """Parse and validate configuration text into a :class:`RunConfig`."""
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in PARSERS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in values:
            raise ConfigError("duplicate key", key=key, line=lineno)
        try:
            values[key] = PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(str(exc), key=key, line=lineno) from None
        lines[key] = lineno
    for key in ("model", "T_final"):
        if key not in values:
            raise ConfigError("required key missing", key=key)
    if values["model"] in QUANTIZED and "N" not in values:
        raise ConfigError(f"required for model {values['model']!r}", key="N")
    if values["model"] == "hazeltine" and "alpha" not in values:
        raise ConfigError("required for model 'hazeltine'", key="alpha")
    cfg = RunConfig(**values)
    if cfg.model in QUANTIZED and "L_cut" not in values:
        cfg = replace(cfg, L_cut=cfg.N - 1)
    validate(cfg, lines)
    return cfg


def validate(cfg, lines=None):
    """Check constraints; ``lines`` maps keys to line numbers for messages."""
    lines = lines or {}

    def fail(key, msg):
        raise ConfigError(msg, key=key, line=lines.get(key))

    if cfg.model not in MODELS:
        fail("model", f"must be one of {', '.join(MODELS)}")
    if not (np.isfinite(cfg.T_final) and cfg.T_final > 0):
        fail("T_final", "must be positive")
    if not (np.isfinite(cfg.h) and cfg.h > 0):
        fail("h", "must be positive")
    if cfg.n_steps < 1:
        fail("T_final", "shorter than one step")
    if abs(cfg.n_steps * cfg.h - cfg.T_final) > 1e-9 * cfg.T_final:
        fail("T_final", "must be an integer multiple of h")
    if cfg.model in QUANTIZED:
        if cfg.N < 2:
            fail("N", "must be at least 2")
        if not 1 <= cfg.L_cut <= cfg.N - 1:
            fail("L_cut", f"must lie in [1, N - 1] = [1, {cfg.N - 1}]")
    if not np.isfinite(cfg.alpha):
        fail("alpha", "must be finite")
    if cfg.kirchhoff_preset not in KIRCHHOFF_PRESETS:
        fail("kirchhoff_preset", f"must be one of {', '.join(KIRCHHOFF_PRESETS)}")
    for key in ("kirchhoff_a",):
        if getattr(cfg, key) and len(getattr(cfg, key)) != 3:
            fail(key, "needs 3 values")
    for key in ("kirchhoff_b", "kirchhoff_c"):
        if len(getattr(cfg, key)) not in (0, 3, 9):
            fail(key, "needs 3 (diagonal) or 9 (row-major) values")
    given = [bool(cfg.kirchhoff_a), bool(cfg.kirchhoff_b), bool(cfg.kirchhoff_c)]
    if cfg.model == "kirchhoff" and any(given) and not all(given):
        fail("kirchhoff_a", "give all of kirchhoff_a, kirchhoff_b, kirchhoff_c or none")
    if cfg.model == "kirchhoff" and cfg.kirchhoff_preset == "custom" and not all(given):
        fail("kirchhoff_preset", "custom needs kirchhoff_a, kirchhoff_b, kirchhoff_c")
    if cfg.model == "kirchhoff":
        try:
            kirchhoff_params(cfg)
        except DomainError as exc:
            fail("kirchhoff_preset", str(exc))
    if cfg.gamma < 0 or not np.isfinite(cfg.gamma):
        fail("gamma", "must be a finite non-negative number")
    if not (np.isfinite(cfg.amplitude) and cfg.amplitude > 0):
        fail("amplitude", "must be positive")
    if cfg.output_every < 1:
        fail("output_every", "must be at least 1")
    if cfg.sample_every < 1:
        fail("sample_every", "must be at least 1")
    if len(cfg.grid) != 2 or min(cfg.grid) < 2:
        fail("grid", "needs two integers n_lat, n_lon >= 2")
    if not cfg.fp_tol > 0:
        fail("fp_tol", "must be positive")
    if cfg.fp_max_iters < 1:
        fail("fp_max_iters", "must be at least 1")
    return cfg


def _matrix(vals):
    return np.diag(vals) if len(vals) == 3 else np.array(vals).reshape(3, 3)


def kirchhoff_params(cfg):
    """KirchhoffParams for a kirchhoff config (preset defaults or explicit)."""
    from ..models import KirchhoffParams, preset

    if not cfg.kirchhoff_a:
        return preset(cfg.kirchhoff_preset)
    return KirchhoffParams(np.array(cfg.kirchhoff_a), _matrix(cfg.kirchhoff_b),
                           _matrix(cfg.kirchhoff_c), cfg.kirchhoff_preset)


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


def serialize(cfg):
    """Config text that :func:`parse_config` maps back to ``cfg``.

    Every field is written, so the output doubles as a fully resolved record.
    Empty Kirchhoff coefficient lists are omitted.
    """
    out = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value == ():
            continue
        out.append(f"{f.name} = {_format(value)}")
    return "\n".join(out) + "\n"
