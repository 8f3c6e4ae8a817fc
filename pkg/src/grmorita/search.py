"""Random census of small Morita contexts.

Candidates are matrix-unit contexts on random transitive relations and
diagonal contexts over random idempotent rings. Half of them get their
pairings rescaled by random field elements, which usually breaks the
associativity laws, so the validator has something to filter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .context import (
    MoritaContext,
    _pairing_kernel_torsion,
    diagonal_context,
    is_nondegenerate,
    kernels_are_torsion,
    validate_context,
)
from .corpus import random_context, random_idempotent_ring
from .groups import from_preset
from .io import instance_from_contexts, to_document
from .lattice import torsion_free_rings

__all__ = ["MAX_DIM_CAP", "SearchBoundError", "Census", "search"]

MAX_DIM_CAP = 12


class SearchBoundError(ValueError):
    pass


@dataclass
class Census:
    params: dict
    counts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    def machine(self) -> str:
        return json.dumps({"params": self.params, "counts": self.counts, "witnesses": self.witnesses}, indent=1, sort_keys=True) + "\n"

    def text(self) -> str:
        lines = [f"search {' '.join(f'{k}={v}' for k, v in sorted(self.params.items()))}"]
        for k in sorted(self.counts):
            lines.append(f"  {k:28} {self.counts[k]}")
        lines.append(f"  witnesses: {', '.join(w['name'] for w in self.witnesses) or 'none'}")
        return "\n".join(lines) + "\n"


def _candidate(G, p: int, max_dim: int, rng: np.random.Generator) -> Optional[MoritaContext]:
    for _ in range(50):
        if rng.random() < 0.5:
            n = int(rng.integers(1, min(3, max_dim) + 1))
            m = int(rng.integers(1, min(3, max_dim) + 1))
            c = random_context(n, m, G, p, rng)
        else:
            ring, _, _ = random_idempotent_ring(max_dim, G, p, rng)
            c = diagonal_context(ring)
        if max(c.A.dim, c.B.dim, c.P.dim, c.Q.dim) <= max_dim:
            if rng.random() < 0.5:
                a, b = (int(x) for x in rng.integers(0, p, size=2))
                c = c.with_pairings(mu=c.mu * a, nu=c.nu * b)
            return c
    return None


def search(p: int = 2, group: str = "Z/2", max_dim: int = 2, count: int = 100, seed: int = 0, keep: int = 3) -> Census:
    """Generate ``count`` candidates and classify the valid ones."""
    if max_dim < 1 or max_dim > MAX_DIM_CAP:
        raise SearchBoundError(f"max_dim must lie in 1..{MAX_DIM_CAP}, got {max_dim}")
    if count < 0:
        raise SearchBoundError("count must be non-negative")
    G = from_preset(group)
    rng = np.random.default_rng(seed)
    keys = ("generated", "valid", "surjective-traces", "nondegenerate", "rings-torsion-free",
            "kernel-nonzero", "kernels-torsion")
    census = Census({"p": p, "group": group, "max_dim": max_dim, "count": count, "seed": seed}, {k: 0 for k in keys})
    kinds_kept: dict[str, int] = {}
    for i in range(count):
        c = _candidate(G, p, max_dim, rng)
        if c is None:
            continue
        census.counts["generated"] += 1
        rep = validate_context(c)
        if not rep.ok:
            continue
        census.counts["valid"] += 1
        ka, kb = kernels_are_torsion(c)
        census.counts["kernels-torsion"] += int(ka and kb)
        kmu = _pairing_kernel_torsion(c.P, c.Q, c.mu)[1].dim
        knu = _pairing_kernel_torsion(c.Q, c.P, c.nu)[1].dim
        nonzero = bool(kmu or knu)
        census.counts["kernel-nonzero"] += int(nonzero)
        sa, sb = rep.traces
        if not (sa and sb):
            continue
        census.counts["surjective-traces"] += 1
        tf = torsion_free_rings(c)
        census.counts["rings-torsion-free"] += int(tf)
        census.counts["nondegenerate"] += int(is_nondegenerate(c).ok)
        kind = "kernel-nonzero" if nonzero else ("torsion" if not tf else "plain")
        if kinds_kept.get(kind, 0) < keep:
            kinds_kept[kind] = kinds_kept.get(kind, 0) + 1
            name = f"w{i}-{kind}"
            doc = to_document(instance_from_contexts({name: MoritaContext(c.A, c.B, c.P, c.Q, c.mu, c.nu, name)}))
            census.witnesses.append({"name": name, "instance": doc})
    return census
