"""JSON system configurations and plain-text complex signal files."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .ifs_core import FrequencyIfs, SpatialIfs
from .transform import FractalSystem, M1Class, build_system


class ConfigError(ValidationError):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None):
        self.source, self.line = source, line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class SystemConfig:
    dim: int
    K: int
    a_inverse: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, ...], ...]
    c: tuple[tuple[int, ...], ...] | None = None
    m1_class: M1Class = M1Class.INVERTIBLE

    def spatial(self) -> SpatialIfs:
        return SpatialIfs(self.a_inverse, self.b)

    def to_system(self) -> FractalSystem:
        if self.c is None:
            raise ValidationError("config has no frequency translations 'c'; run 'search' first")
        spatial = self.spatial()
        return build_system(spatial, FrequencyIfs.dual_of(spatial, self.c), self.m1_class)

    def with_frequencies(self, c, m1_class=None) -> "SystemConfig":
        m1_class = self.m1_class if m1_class is None else M1Class(m1_class)
        return SystemConfig(self.dim, self.K, self.a_inverse, self.b, tuple(map(tuple, c)), m1_class)

    def to_json(self) -> str:
        data = {
            "dim": self.dim,
            "K": self.K,
            "a_inverse": [list(r) for r in self.a_inverse],
            "b": [list(v) for v in self.b],
        }
        if self.c is not None:
            data["c"] = [list(v) for v in self.c]
        data["m1_class"] = self.m1_class.value
        return json.dumps(data, indent=2) + "\n"


def _key_line(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_config(text: str, source: str = "<config>") -> SystemConfig:
    """Parse and validate a JSON system configuration.

    Every error message names the source and the line of the offending key.
    ``a_inverse`` may be nested rows or a flat row-major list; for ``dim == 1``
    translation vectors may be written as bare integers.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", source, exc.lineno) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", source, 1)

    def fail(key: str, msg: str):
        raise ConfigError(f"{key}: {msg}", source, _key_line(text, key))

    for key in ("dim", "K", "a_inverse", "b"):
        if key not in data:
            raise ConfigError(f"missing required field '{key}'", source, 1)
    unknown = set(data) - {"dim", "K", "a_inverse", "b", "c", "m1_class"}
    if unknown:
        fail(sorted(unknown)[0], "unknown field")

    dim, K = data["dim"], data["K"]
    if not _is_int(dim) or dim < 1:
        fail("dim", f"must be a positive integer, got {dim!r}")
    if not _is_int(K) or K < 1:
        fail("K", f"must be a positive integer, got {K!r}")

    a = data["a_inverse"]
    if isinstance(a, list) and len(a) == dim * dim and all(_is_int(x) for x in a):
        a = [a[i * dim:(i + 1) * dim] for i in range(dim)]
    if not (isinstance(a, list) and len(a) == dim
            and all(isinstance(r, list) and len(r) == dim and all(_is_int(x) for x in r) for r in a)):
        fail("a_inverse", f"must be a {dim}x{dim} integer matrix")

    def vectors(key: str):
        vs = data[key]
        if not isinstance(vs, list) or len(vs) != K:
            fail(key, f"must be a list of K={K} integer vectors")
        out = []
        for i, v in enumerate(vs):
            if dim == 1 and _is_int(v):
                v = [v]
            if not (isinstance(v, list) and len(v) == dim and all(_is_int(x) for x in v)):
                fail(key, f"entry {i} must be an integer vector of length {dim}")
            out.append(tuple(v))
        if any(out[0]):
            fail(key, "first vector must be zero")
        return tuple(out)

    b = vectors("b")
    c = vectors("c") if data.get("c") is not None else None
    try:
        m1_class = M1Class(data.get("m1_class", "invertible"))
    except ValueError:
        fail("m1_class", "must be 'invertible' or 'hadamard'")
    a = tuple(map(tuple, a))
    try:
        SpatialIfs(a, b)
    except ValidationError as exc:
        fail("a_inverse", str(exc))
    return SystemConfig(dim, K, a, b, c, m1_class)


def load_config(path) -> SystemConfig:
    path = Path(path)
    return parse_config(path.read_text(), str(path))


# ---------------------------------------------------------------------------
# signals: one "re,im" pair per line


def format_signal(values) -> str:
    values = np.asarray(values, dtype=complex).reshape(-1)
    return "".join(f"{z.real:.17g},{z.imag:.17g}\n" for z in values)


def parse_signal(text: str, source: str = "<signal>") -> np.ndarray:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValidationError(f"{source}:{lineno}: expected 're,im', got {line!r}")
        try:
            out.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise ValidationError(f"{source}:{lineno}: not a pair of floats: {line!r}") from None
    return np.array(out, dtype=complex)


def read_signal(path) -> np.ndarray:
    path = Path(path)
    return parse_signal(path.read_text(), str(path))


def write_signal(path, values) -> None:
    Path(path).write_text(format_signal(values))
