"""Shared structured text format for instances, polytopes, matroids, and
run traces.

Documents are plain JSON with sorted keys; floats round-trip bit-exactly
through Python's shortest-repr float encoding. Seeded constructions (the
perturbed family) store only their seed and parameters and rebuild their
noise tables deterministically on load.
"""

from __future__ import annotations

import json
from pathlib import Path

from .algorithms import RunTrace
from .continuous import (BoxPolytope, CardinalityPolytope,
                         KnapsackPolytope, MultilinearOracle,
                         PartitionPolytope, QuadraticOracle,
                         SqrtLinearOracle)
from .matroids import (GraphicMatroid, PartitionMatroid, PSystem,
                       UniformMatroid)
from .oracles import (CoverageOracle, CutOracle, ModularOracle,
                      PerturbedOracle)

SCHEMA = "submodlab/1"


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def to_doc(obj) -> dict:
    """Serialize a supported object to a JSON-ready document."""
    if isinstance(obj, ModularOracle):
        return {"schema": SCHEMA, "kind": "set-function", "family": "modular",
                "weights": obj.weights.tolist()}
    if isinstance(obj, CoverageOracle):
        return {"schema": SCHEMA, "kind": "set-function", "family": "coverage",
                "n": obj.n, "covers": [sorted(c) for c in obj.covers],
                "universe_weights": obj.universe_weights.tolist()}
    if isinstance(obj, CutOracle):
        return {"schema": SCHEMA, "kind": "set-function", "family": "cut",
                "n": obj.n,
                "edges": [[a, b, w] for a, b, w in obj.edges]}
    if isinstance(obj, PerturbedOracle):
        return {"schema": SCHEMA, "kind": "set-function",
                "family": "synthetic-perturbed", "base": to_doc(obj.base),
                "delta": obj.delta, "seed": obj.seed,
                "monotone_noise": obj.monotone_noise}
    if isinstance(obj, UniformMatroid):
        return {"schema": SCHEMA, "kind": "matroid", "family": "uniform",
                "n": obj.n, "k": obj.k}
    if isinstance(obj, PartitionMatroid):
        return {"schema": SCHEMA, "kind": "matroid", "family": "partition",
                "blocks": [list(b) for b in obj.blocks],
                "caps": list(obj.caps)}
    if isinstance(obj, GraphicMatroid):
        return {"schema": SCHEMA, "kind": "matroid", "family": "graphic",
                "num_vertices": obj.num_vertices,
                "edges": [[a, b] for a, b in obj.edges]}
    if isinstance(obj, PSystem):
        if obj.matroids is None:
            raise ValueError("only matroid-intersection p-systems serialize")
        return {"schema": SCHEMA, "kind": "p-system",
                "matroids": [to_doc(m) for m in obj.matroids]}
    if isinstance(obj, BoxPolytope):
        return {"schema": SCHEMA, "kind": "polytope", "family": "box",
                "upper": obj.upper.tolist()}
    if isinstance(obj, CardinalityPolytope):
        return {"schema": SCHEMA, "kind": "polytope", "family": "cardinality",
                "n": obj.n, "k": obj.k}
    if isinstance(obj, PartitionPolytope):
        return {"schema": SCHEMA, "kind": "polytope", "family": "partition",
                "blocks": [list(b) for b in obj.blocks],
                "caps": list(obj.caps)}
    if isinstance(obj, KnapsackPolytope):
        return {"schema": SCHEMA, "kind": "polytope", "family": "knapsack",
                "costs": obj.costs.tolist(), "budget": obj.budget}
    if isinstance(obj, QuadraticOracle):
        return {"schema": SCHEMA, "kind": "continuous", "family": "quadratic",
                "b": obj.b.tolist(), "a": obj.a.tolist()}
    if isinstance(obj, SqrtLinearOracle):
        return {"schema": SCHEMA, "kind": "continuous", "family": "sqrt-linear",
                "b": obj.b.tolist(), "shift": obj.shift}
    if isinstance(obj, MultilinearOracle):
        return {"schema": SCHEMA, "kind": "continuous", "family": "multilinear",
                "base": to_doc(obj.base)}
    if isinstance(obj, RunTrace):
        return {"schema": SCHEMA, "kind": "trace", "algorithm": obj.algorithm,
                "params": obj.params, "seed": obj.seed,
                "iterations": obj.iterations, "final": obj.final,
                "meta": obj.meta}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_doc(doc: dict):
    """Rebuild a supported object from its document."""
    kind = doc.get("kind")
    if kind == "set-function":
        family = doc["family"]
        if family == "modular":
            return ModularOracle(doc["weights"])
        if family == "coverage":
            return CoverageOracle(doc["n"], doc["covers"],
                                  doc["universe_weights"])
        if family == "cut":
            return CutOracle(doc["n"], [tuple(e) for e in doc["edges"]])
        if family == "synthetic-perturbed":
            base = from_doc(doc["base"])
            return PerturbedOracle(base, doc["delta"], doc["seed"],
                                   monotone_noise=doc["monotone_noise"])
        raise ValueError(f"unknown set-function family {family!r}")
    if kind == "matroid":
        family = doc["family"]
        if family == "uniform":
            return UniformMatroid(doc["n"], doc["k"])
        if family == "partition":
            return PartitionMatroid(doc["blocks"], doc["caps"])
        if family == "graphic":
            return GraphicMatroid(doc["num_vertices"],
                                  [tuple(e) for e in doc["edges"]])
        raise ValueError(f"unknown matroid family {family!r}")
    if kind == "p-system":
        return PSystem.from_matroids([from_doc(m) for m in doc["matroids"]])
    if kind == "polytope":
        family = doc["family"]
        if family == "box":
            return BoxPolytope(doc["upper"])
        if family == "cardinality":
            return CardinalityPolytope(doc["n"], doc["k"])
        if family == "partition":
            return PartitionPolytope(doc["blocks"], doc["caps"])
        if family == "knapsack":
            return KnapsackPolytope(doc["costs"], doc["budget"])
        raise ValueError(f"unknown polytope family {family!r}")
    if kind == "continuous":
        family = doc["family"]
        if family == "quadratic":
            return QuadraticOracle(doc["b"], doc["a"])
        if family == "sqrt-linear":
            return SqrtLinearOracle(doc["b"], doc["shift"])
        if family == "multilinear":
            return MultilinearOracle(from_doc(doc["base"]))
        raise ValueError(f"unknown continuous family {family!r}")
    if kind == "trace":
        return RunTrace(algorithm=doc["algorithm"], params=doc["params"],
                        seed=doc["seed"], iterations=doc["iterations"],
                        final=doc["final"], meta=doc["meta"])
    if kind == "bundle":
        return doc  # bundles stay documents; use load_bundle for components
    raise ValueError(f"unknown document kind {kind!r}")


def bundle_doc(problem: int, components: dict, measured: dict | None = None,
               meta: dict | None = None) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "bundle",
        "problem": int(problem),
        "components": {name: to_doc(obj) for name, obj in components.items()},
        "measured": measured or {},
        "meta": meta or {},
    }


def load_bundle(doc: dict) -> dict:
    if doc.get("kind") != "bundle":
        raise ValueError("not a bundle document")
    out = {name: from_doc(sub) for name, sub in doc["components"].items()}
    out["_measured"] = doc.get("measured", {})
    out["_meta"] = doc.get("meta", {})
    out["_problem"] = doc.get("problem")
    return out


def save(obj_or_doc, path) -> Path:
    doc = obj_or_doc if isinstance(obj_or_doc, dict) else to_doc(obj_or_doc)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(doc))
    return path


def load(path):
    doc = json.loads(Path(path).read_text())
    return from_doc(doc)


def load_doc(path) -> dict:
    return json.loads(Path(path).read_text())
