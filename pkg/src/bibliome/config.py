"""Pipeline configuration.

Config files are plain text, one ``key = value`` per line; ``#`` starts a
comment.  Keys are the field names of :class:`Config`.  Tuple-valued keys
take comma-separated values.  Example::

    # VTT parameters
    feature_kind = cooccur
    lambda0 = 1.0
    beta = 15
    sweep_lambda0 = 0, 10, 0.25
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import get_type_hints


@dataclass(frozen=True)
class Config:
    seed: int = 0
    # features
    k_words: int = 650
    feature_kind: str = "cooccur"
    presence: bool = True
    # VTT decision and confidence bands
    lambda0: float = 1.0
    beta: float = 15.0
    band_low: float = 0.1
    band_high: float = 0.5
    # partitioning and sweep
    n_partitions: int = 8
    test_fraction: float = 0.25
    additional_fraction: float = 0.5
    sweep_lambda0: tuple = (0.0, 10.0, 0.25)
    sweep_beta: tuple = (1.0, 50.0, 2.0)
    sweep_kinds: tuple = ("word", "bigram_plus", "cooccur")
    # LSI
    lsi_k: int = 100
    boundary_m: tuple = (0.0, 3.0, 0.05)
    boundary_b: tuple = (-1.0, 1.0, 0.01)
    # uncertainty integration
    fusion_priority: tuple = ("lsi", "vtt_cooccur", "vtt_bigram_plus")
    fusion_correctness_mask: bool = True
    # full text
    pair_top_n: int = 1000
    sentence_top_n: int = 200
    expand_threshold: float = 0.25
    expand_limit: int = 50
    # service
    max_text_bytes: int = 100_000

    def updated(self, **changes) -> "Config":
        return replace(self, **changes)


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(key: str, raw: str, typ, default):
    raw = raw.strip()
    if typ is bool:
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
    if typ is int:
        return int(raw)
    if typ is float:
        return float(raw)
    if typ is tuple:
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        if default and isinstance(default[0], float):
            return tuple(float(p) for p in parts)
        return tuple(parts)
    return raw


def parse_config(text: str, base: Config = Config()) -> Config:
    hints = get_type_hints(Config)
    defaults = {f.name: f.default for f in fields(Config)}
    changes = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in hints:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        try:
            changes[key] = _coerce(key, value, hints[key], defaults[key])
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: {exc}") from None
    return replace(base, **changes)


def load_config(path) -> Config:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def dump_config(cfg: Config) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ", ".join(str(x) for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
