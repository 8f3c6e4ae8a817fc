"""Instance files: a JSON document holding a grading group, rings, modules and contexts.

Structure constants are listed sparsely as ``[i, j, k, c]`` quadruples, read
as "the product of basis element ``i`` with basis element ``j`` has
coefficient ``c`` on basis element ``k``". For a left action ``i`` indexes the
ring and ``j`` the module; for a right action ``i`` indexes the module and
``j`` the ring. Pairings ``mu`` and ``nu`` use ``[p, q, a, c]`` and
``[q, p, b, c]``. Omitted entries are zero.

Example::

    {
      "schema_version": 1,
      "p": 2,
      "group": "Z/2",
      "rings": {"F2": {"basis": ["e"], "degrees": ["0"], "products": [[0, 0, 0, 1]]}}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import jsonschema
import numpy as np

from .context import MoritaContext
from .graded import GradedModule, GradedRing, GradedSpace, validate_module, validate_ring
from .groups import PRESETS, FiniteGroup, GroupError, from_preset

__all__ = [
    "SCHEMA_VERSION",
    "SCHEMA",
    "InstanceError",
    "InstanceParseError",
    "InstanceValidationError",
    "Instance",
    "loads_instance",
    "load_instance",
    "dumps_instance",
    "save_instance",
    "instance_from_contexts",
]

SCHEMA_VERSION = 1

_QUADS = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "integer"}, "minItems": 4, "maxItems": 4},
}
_DEGREE = {"anyOf": [{"type": "string"}, {"type": "integer", "minimum": 0}]}
_ACTION = {
    "type": "object",
    "additionalProperties": False,
    "required": ["ring", "action"],
    "properties": {"ring": {"type": "string"}, "action": _QUADS},
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "p", "group"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "description": {"type": "string"},
        "p": {"type": "integer", "minimum": 2},
        "group": {
            "anyOf": [
                {"enum": list(PRESETS)},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["table"],
                    "properties": {
                        "table": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                        "names": {"type": "array", "items": {"type": "string"}},
                    },
                },
            ]
        },
        "rings": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "required": ["basis", "degrees", "products"],
                "properties": {
                    "basis": {"type": "array", "items": {"type": "string"}},
                    "degrees": {"type": "array", "items": _DEGREE},
                    "products": _QUADS,
                },
            },
        },
        "modules": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "required": ["basis", "degrees"],
                "properties": {
                    "basis": {"type": "array", "items": {"type": "string"}},
                    "degrees": {"type": "array", "items": _DEGREE},
                    "left": _ACTION,
                    "right": _ACTION,
                },
            },
        },
        "contexts": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "required": ["A", "B", "P", "Q", "mu", "nu"],
                "properties": {
                    "A": {"type": "string"},
                    "B": {"type": "string"},
                    "P": {"type": "string"},
                    "Q": {"type": "string"},
                    "mu": _QUADS,
                    "nu": _QUADS,
                },
            },
        },
    },
}


class InstanceError(ValueError):
    """Base class for instance file problems."""


class InstanceParseError(InstanceError):
    """Syntax, schema or reference error; ``where`` locates it in the file."""

    def __init__(self, message: str, where: str):
        super().__init__(f"{where}: {message}")
        self.where = where


class InstanceValidationError(InstanceError):
    """An object loaded but violates an algebra axiom; carries the first witness."""

    def __init__(self, obj: str, axiom: str, witness, detail: str = ""):
        w = tuple(int(x) for x in witness) if witness is not None else ()
        super().__init__(f"{obj}: {axiom} fails at {w}" + (f" ({detail})" if detail else ""))
        self.obj, self.axiom, self.witness = obj, axiom, w


@dataclass
class Instance:
    group: FiniteGroup
    p: int
    rings: dict[str, GradedRing] = field(default_factory=dict)
    modules: dict[str, GradedModule] = field(default_factory=dict)
    contexts: dict[str, MoritaContext] = field(default_factory=dict)
    group_preset: Optional[str] = None
    description: str = ""

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Instance)
            and self.group == other.group
            and self.p == other.p
            and self.rings == other.rings
            and self.modules == other.modules
            and self.contexts == other.contexts
        )

    def ring_name(self, r: GradedRing) -> str:
        for k, v in self.rings.items():
            if v == r:
                return k
        raise KeyError("ring not registered in instance")

    def module_name(self, m: GradedModule) -> str:
        for k, v in self.modules.items():
            if v == m:
                return k
        raise KeyError("module not registered in instance")


# ---------------------------------------------------------------------------
# Loading


def _path(parts) -> str:
    out = "$"
    for x in parts:
        out += f"[{x}]" if isinstance(x, int) else f".{x}"
    return out


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def _group(spec) -> tuple[FiniteGroup, Optional[str]]:
    try:
        if isinstance(spec, str):
            return from_preset(spec), spec
        return FiniteGroup(spec["table"], spec.get("names")), None
    except GroupError as e:
        raise InstanceParseError(str(e), "$.group") from None


def _degrees(G: FiniteGroup, degs, where: str) -> tuple[int, ...]:
    out = []
    for i, d in enumerate(degs):
        try:
            out.append(G.index(d))
        except GroupError as e:
            raise InstanceParseError(str(e), f"{where}[{i}]") from None
    return tuple(out)


def _dense(quads, shape: tuple[int, int, int], p: int, where: str) -> np.ndarray:
    t = np.zeros(shape, dtype=np.int64)
    seen = set()
    for n, q in enumerate(quads):
        i, j, k, c = q
        if not (0 <= i < shape[0] and 0 <= j < shape[1] and 0 <= k < shape[2]):
            raise InstanceParseError(f"index out of range for shape {shape}", f"{where}[{n}]")
        if (i, j, k) in seen:
            raise InstanceParseError(f"duplicate entry for ({i}, {j}, {k})", f"{where}[{n}]")
        seen.add((i, j, k))
        t[i, j, k] = c % p
    return t


def _check_names(basis, degrees, where: str) -> None:
    if len(basis) != len(degrees):
        raise InstanceParseError(f"{len(basis)} basis names but {len(degrees)} degrees", where)
    if len(set(basis)) != len(basis):
        raise InstanceParseError("basis names must be distinct", f"{where}.basis")


def _from_document(doc: dict) -> Instance:
    p = doc["p"]
    if not _is_prime(p):
        raise InstanceParseError(f"p = {p} is not prime", "$.p")
    G, preset = _group(doc["group"])
    inst = Instance(G, p, group_preset=preset, description=doc.get("description", ""))
    for name, r in doc.get("rings", {}).items():
        where = _path(["rings", name])
        _check_names(r["basis"], r["degrees"], where)
        space = GradedSpace(G, p, _degrees(G, r["degrees"], f"{where}.degrees"))
        n = space.dim
        table = _dense(r["products"], (n, n, n), p, f"{where}.products")
        ring = GradedRing(space, table, names=r["basis"])
        v = validate_ring(ring).first()
        if v is not None:
            raise InstanceValidationError(f"ring {name}", v.axiom, v.witness, v.detail)
        inst.rings[name] = ring
    for name, m in doc.get("modules", {}).items():
        where = _path(["modules", name])
        _check_names(m["basis"], m["degrees"], where)
        space = GradedSpace(G, p, _degrees(G, m["degrees"], f"{where}.degrees"))
        d = space.dim
        acts = {}
        for side in ("left", "right"):
            if side not in m:
                continue
            rname = m[side]["ring"]
            if rname not in inst.rings:
                raise InstanceParseError(f"unknown ring {rname!r}", f"{where}.{side}.ring")
            ring = inst.rings[rname]
            if side == "left":
                t = _dense(m[side]["action"], (ring.dim, d, d), p, f"{where}.{side}.action")
                act = t.transpose(0, 2, 1)  # act[i][k, j]: b_i m_j has coefficient on m_k
            else:
                t = _dense(m[side]["action"], (d, ring.dim, d), p, f"{where}.{side}.action")
                act = t.transpose(1, 2, 0)  # act[i][k, j]: m_j b_i has coefficient on m_k
            acts[side] = (ring, act)
        mod = GradedModule(space, names=m["basis"], **acts)
        v = validate_module(mod).first()
        if v is not None:
            raise InstanceValidationError(f"module {name}", v.axiom, v.witness, v.detail)
        inst.modules[name] = mod
    for name, c in doc.get("contexts", {}).items():
        where = _path(["contexts", name])
        refs = {}
        for key, pool in (("A", inst.rings), ("B", inst.rings), ("P", inst.modules), ("Q", inst.modules)):
            if c[key] not in pool:
                raise InstanceParseError(f"unknown name {c[key]!r}", f"{where}.{key}")
            refs[key] = pool[c[key]]
        A, B, P, Q = refs["A"], refs["B"], refs["P"], refs["Q"]
        for key, mod, lring, rring in (("P", P, A, B), ("Q", Q, B, A)):
            if not (mod.has("left") and mod.has("right") and mod.ring("left") == lring and mod.ring("right") == rring):
                raise InstanceParseError(f"{c[key]!r} is not a bimodule over the context rings", f"{where}.{key}")
        mu = _dense(c["mu"], (P.dim, Q.dim, A.dim), p, f"{where}.mu")
        nu = _dense(c["nu"], (Q.dim, P.dim, B.dim), p, f"{where}.nu")
        inst.contexts[name] = MoritaContext(A, B, P, Q, mu, nu, name=name)
    return inst


def loads_instance(text: str, source: str = "<string>") -> Instance:
    """Parse, schema-check, resolve and validate an instance document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(e.msg, f"{source}:{e.lineno}:{e.colno}") from None
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        e = errors[0]
        raise InstanceParseError(e.message, f"{source}:{_path(e.absolute_path)}")
    try:
        return _from_document(doc)
    except InstanceParseError as e:
        raise InstanceParseError(str(e).split(": ", 1)[1], f"{source}:{e.where}") from None


def load_instance(path: Union[str, Path]) -> Instance:
    path = Path(path)
    return loads_instance(path.read_text(encoding="utf-8"), str(path))


# ---------------------------------------------------------------------------
# Saving


def _quads(t: np.ndarray) -> list[list[int]]:
    return [[int(i), int(j), int(k), int(t[i, j, k])] for i, j, k in np.argwhere(t)]


def _degree_names(G: FiniteGroup, degs) -> list[str]:
    return [G.names[d] for d in degs]


def to_document(inst: Instance) -> dict:
    G = inst.group
    doc: dict = {"schema_version": SCHEMA_VERSION}
    if inst.description:
        doc["description"] = inst.description
    doc["p"] = inst.p
    if inst.group_preset is not None:
        doc["group"] = inst.group_preset
    else:
        doc["group"] = {"table": G.table.tolist(), "names": list(G.names)}
    doc["rings"] = {
        name: {"basis": list(r.names), "degrees": _degree_names(G, r.degrees), "products": _quads(r.table)}
        for name, r in inst.rings.items()
    }
    mods = {}
    for name, m in inst.modules.items():
        e: dict = {"basis": list(m.names), "degrees": _degree_names(G, m.degrees)}
        for side in m.sides:
            act = m.action(side)
            t = act.transpose(0, 2, 1) if side == "left" else act.transpose(2, 0, 1)
            e[side] = {"ring": inst.ring_name(m.ring(side)), "action": _quads(t)}
        mods[name] = e
    doc["modules"] = mods
    doc["contexts"] = {
        name: {
            "A": inst.ring_name(c.A),
            "B": inst.ring_name(c.B),
            "P": inst.module_name(c.P),
            "Q": inst.module_name(c.Q),
            "mu": _quads(c.mu),
            "nu": _quads(c.nu),
        }
        for name, c in inst.contexts.items()
    }
    return doc


def _format(x, indent: int = 0) -> str:
    """JSON with one quadruple per line and short scalar lists kept inline."""
    pad = "  " * indent
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_format(v, indent + 1)}' for k, v in x.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(x, list) and x and all(isinstance(v, list) for v in x):
        items = [f"{pad}  {json.dumps(v, separators=(', ', ': '))}" for v in x]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(x)


def dumps_instance(inst: Instance) -> str:
    return _format(to_document(inst)) + "\n"


def save_instance(inst: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8")


def instance_from_contexts(contexts: dict[str, MoritaContext], description: str = "") -> Instance:
    """Register each context's rings and bimodules under ``<context>.A`` style names.

    Objects that are structurally equal to an already registered one are
    shared, so a diagonal context stores its ring once.
    """
    first = next(iter(contexts.values()))
    G = first.group
    preset = G.label if G.label in PRESETS else None
    inst = Instance(G, first.p, group_preset=preset, description=description)
    for cname, c in contexts.items():
        if c.group != G or c.p != first.p:
            raise ValueError("all contexts in one instance must share p and the grading group")
        for role, r in (("A", c.A), ("B", c.B)):
            if not any(v == r for v in inst.rings.values()):
                inst.rings[f"{cname}.{role}"] = r
        for role, m in (("P", c.P), ("Q", c.Q)):
            if not any(v == m for v in inst.modules.values()):
                inst.modules[f"{cname}.{role}"] = m
        inst.contexts[cname] = c
    return inst
