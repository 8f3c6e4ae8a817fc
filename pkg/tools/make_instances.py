"""Regenerate the bundled instance files from the corpus builders."""

import json
import sys
from pathlib import Path

import numpy as np

from grmorita.corpus import named_contexts
from grmorita.io import dumps_instance, instance_from_contexts
from grmorita.instances import DIR


def file_name(ctx_name: str) -> str:
    return ctx_name.lower() + ".ctx"


def negative_files() -> dict[str, str]:
    E1 = named_contexts()["E1"]
    bad_nu = E1.with_pairings(nu=np.zeros_like(E1.nu), name="E1-zero-nu")
    out = {"e1-zero-nu.ctx": dumps_instance(instance_from_contexts({"E1-zero-nu": bad_nu}))}
    doc = {
        "schema_version": 1,
        "p": 2,
        "group": "Z/1",
        "rings": {
            # x x = y and every other product zero except y x = x: (x x) x = y x = x, x (x x) = x y = 0
            "bad": {"basis": ["x", "y"], "degrees": ["0", "0"], "products": [[0, 0, 1, 1], [1, 0, 0, 1]]}
        },
    }
    out["nonassociative.ctx"] = json.dumps(doc, indent=2) + "\n"
    out["empty-ring.ctx"] = json.dumps(
        {"schema_version": 1, "p": 2, "group": "Z/2", "rings": {"zero": {"basis": [], "degrees": [], "products": []}}},
        indent=2,
    ) + "\n"
    return out


def expected_files() -> dict[str, str]:
    out = {file_name(n): dumps_instance(instance_from_contexts({n: c})) for n, c in named_contexts().items()}
    out.update(negative_files())
    return out


def main(target: Path = DIR) -> None:
    for name, text in expected_files().items():
        (target / name).write_text(text, encoding="utf-8")
        print("wrote", target / name)


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else DIR)
