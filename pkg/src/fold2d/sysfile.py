"""Line-oriented system definition files.

::

    # comment
    [system]
    f = x^2 + exp(a*sin(b*t))*y + c
    g = -2*exp(-a*sin(b*t))*x^3 - 2*x*y - a*b*y*cos(b*t)
    [params]
    a = 1
    [domain]
    t = 0, 2
    [simulate]
    t0 = 0
    ...

Expression values run to the end of the line.  When a ``[forcing]`` section
is present, the identifiers ``delta`` and ``delta_dot`` are replaced textually
by the forcing function and its derivative before parsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .expr import FUNCTIONS, Expr, ExprError, differentiate, parse_expr, rename, to_text
from .folding import DEFAULT_DOMAIN, SYSTEM_VARS, PlanarSystem, delta_from_linear

SECTIONS = {
    "system": {"f", "g"},
    "params": None,  # any parameter name
    "domain": {"t", "x", "y"},
    "simulate": {"t0", "t1", "dt", "x0", "y0"},
    "lyapunov": {
        "t_transient", "t_total", "renorm_dt", "dt", "d0", "seed",
        "threshold", "radius", "window", "target",
    },
    "forcing": {"K", "A", "c", "omega"},
    "target": {"phi", "sigma", "A", "B", "C"},
}

# Folded targets are written with x for u and xdot for w.
TARGET_VARS = ("t", "x", "xdot")
RESERVED = set(SYSTEM_VARS) | {"u", "w", "xdot", "delta", "delta_dot"} | set(FUNCTIONS)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class SystemFileError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        where = f"{path or '<system file>'}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}")


@dataclass
class Entry:
    value: str
    line: int


@dataclass
class SystemFile:
    sections: dict = field(default_factory=dict)  # name -> {key: Entry}
    path: str | None = None

    def has(self, section: str) -> bool:
        return section in self.sections

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})

    def error(self, message: str, line: int | None = None) -> SystemFileError:
        return SystemFileError(message, line, self.path)

    def number(self, section: str, key: str, default=None) -> float | None:
        entry = self.section(section).get(key)
        if entry is None:
            return default
        try:
            return float(entry.value)
        except ValueError:
            raise self.error(f"[{section}] {key} must be a number, got {entry.value!r}", entry.line) from None

    # Expressions ---------------------------------------------------------

    @property
    def params(self) -> dict[str, float]:
        return {k: self.number("params", k) for k in self.section("params")}

    def _forcing_value(self, key: str, params: dict) -> float:
        entry = self.section("forcing").get(key)
        if entry is None:
            raise self.error(f"[forcing] needs {key}")
        text = entry.value.strip()
        if text in params:
            return params[text]
        try:
            return float(text)
        except ValueError:
            raise self.error(f"[forcing] {key} must be a number or parameter name", entry.line) from None

    def forcing(self, params: dict) -> Expr | None:
        if not self.has("forcing"):
            return None
        K, A, c, omega = (self._forcing_value(k, params) for k in ("K", "A", "c", "omega"))
        try:
            return delta_from_linear(K, A, c, omega)
        except ValueError as exc:
            raise self.error(str(exc)) from None

    def expand(self, text: str, params: dict) -> str:
        delta = self.forcing(params)
        if delta is None:
            return text
        text = re.sub(r"\bdelta_dot\b", f"({to_text(differentiate(delta, 't'))})", text)
        return re.sub(r"\bdelta\b", f"({to_text(delta)})", text)

    def expression(self, section: str, key: str, variables, params: dict) -> Expr:
        entry = self.section(section).get(key)
        if entry is None:
            raise self.error(f"[{section}] needs {key}")
        try:
            return parse_expr(self.expand(entry.value, params), variables, params)
        except ExprError as exc:
            raise self.error(f"[{section}] {key}: {exc}", entry.line) from None

    def target_expression(self, key: str, params: dict) -> Expr:
        """A folded target over (t, u, w), written in the file with x and xdot."""
        e = self.expression("target", key, TARGET_VARS, params)
        return rename(e, {"x": "u", "xdot": "w"})

    def system(self, params: dict | None = None, require_g: bool = True) -> PlanarSystem:
        params = self.params if params is None else params
        if not self.has("system"):
            raise self.error("missing [system] section")
        f = self.expression("system", "f", SYSTEM_VARS, params)
        if "g" in self.section("system"):
            g = self.expression("system", "g", SYSTEM_VARS, params)
        elif require_g:
            raise self.error("[system] needs g")
        else:
            g = parse_expr("0")
        domain = dict(DEFAULT_DOMAIN)
        for name, entry in self.section("domain").items():
            domain[name] = self._interval(entry)
        try:
            return PlanarSystem(f, g, params, domain)
        except ValueError as exc:
            raise self.error(str(exc)) from None

    def _interval(self, entry: Entry) -> tuple[float, float]:
        parts = entry.value.strip().strip("[]").split(",")
        try:
            lo, hi = (float(p) for p in parts)
        except ValueError:
            raise self.error(f"interval must be 'lo, hi', got {entry.value!r}", entry.line) from None
        if not lo <= hi:
            raise self.error(f"empty interval {entry.value!r}", entry.line)
        return lo, hi


def parse_system_text(text: str, path: str | None = None) -> SystemFile:
    sf = SystemFile(path=path)
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise sf.error(f"malformed section header {line!r}", lineno)
            current = line[1:-1].strip()
            if current not in SECTIONS:
                raise sf.error(f"unknown section [{current}]", lineno)
            if current in sf.sections:
                raise sf.error(f"duplicate section [{current}]", lineno)
            sf.sections[current] = {}
            continue
        if current is None:
            raise sf.error("key outside of any section", lineno)
        if "=" not in line:
            raise sf.error(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        allowed = SECTIONS[current]
        if allowed is None:
            if not _IDENT.match(key) or key in RESERVED:
                raise sf.error(f"invalid parameter name {key!r}", lineno)
        elif key not in allowed:
            raise sf.error(f"unknown key {key!r} in [{current}]", lineno)
        if key in sf.sections[current]:
            raise sf.error(f"duplicate key {key!r} in [{current}]", lineno)
        if not value:
            raise sf.error(f"empty value for {key!r}", lineno)
        sf.sections[current][key] = Entry(value, lineno)
    if "system" not in sf.sections:
        raise sf.error("missing [system] section")
    if "f" not in sf.sections["system"]:
        raise sf.error("[system] needs f")
    for key, entry in sf.section("params").items():
        sf.number("params", key)
    return sf


def load_system_file(path: str | Path) -> SystemFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SystemFileError(f"cannot read file: {exc.strerror}", None, str(path)) from None
    return parse_system_text(text, str(path))
