import numpy as np
import pytest

from submodlab.algorithms import random_greedy_dummies
from submodlab.continuous import (BoxPolytope, CardinalityPolytope,
                                  KnapsackPolytope, MultilinearOracle,
                                  PartitionPolytope, random_quadratic_dr,
                                  random_sqrt_linear, random_weak_quadratic)
from submodlab.matroids import (PSystem, random_graphic_matroid,
                                random_partition_matroid,
                                random_uniform_matroid)
from submodlab.oracles import (random_coverage, random_cut, random_modular,
                               random_perturbed)
from submodlab.serialization import (bundle_doc, canonical_json, from_doc,
                                     load, load_bundle, save, to_doc)


def roundtrip(obj):
    return from_doc(to_doc(obj))


def test_set_function_roundtrips_bit_exact():
    for f in (random_modular(7, 1), random_coverage(7, 2), random_cut(7, 3),
              random_perturbed(7, 0.37, 4), random_perturbed(7, 0.37, 4, monotone=True)):
        g = roundtrip(f)
        assert np.array_equal(f.table(), g.table())
        assert g.family == f.family
        assert g.monotone == f.monotone


def test_matroid_roundtrips():
    for m in (random_uniform_matroid(8, 5), random_partition_matroid(8, 6),
              random_graphic_matroid(8, 7)):
        m2 = roundtrip(m)
        for mask in range(1 << 8):
            assert m.indep_mask(mask) == m2.indep_mask(mask)


def test_psystem_roundtrip():
    system = PSystem.from_matroids([random_partition_matroid(6, 8),
                                    random_partition_matroid(6, 9)])
    s2 = roundtrip(system)
    assert s2.p == 2
    for mask in range(1 << 6):
        assert system.indep_mask(mask) == s2.indep_mask(mask)


def test_polytope_roundtrips():
    rng = np.random.default_rng(0)
    polys = [BoxPolytope([1.0, 0.25, 0.7]), CardinalityPolytope(3, 2),
             PartitionPolytope([[0, 1], [2]], [1, 1]),
             KnapsackPolytope([0.5, 1.0, 2.0], 2.2)]
    for p in polys:
        q = roundtrip(p)
        assert q.diameter == p.diameter
        for _ in range(50):
            c = rng.normal(size=3)
            assert np.array_equal(p.lmo(c), q.lmo(c))


def test_continuous_roundtrips_bit_exact():
    rng = np.random.default_rng(1)
    oracles = [random_quadratic_dr(4, 10, monotone=True),
               random_quadratic_dr(4, 11, monotone=False),
               random_weak_quadratic(4, 12),
               random_sqrt_linear(4, 13),
               MultilinearOracle(random_coverage(5, 14))]
    for f in oracles:
        g = roundtrip(f)
        assert g.smoothness == f.smoothness
        assert g.value_lipschitz == f.value_lipschitz
        for _ in range(25):
            x = rng.uniform(0, 1, f.n)
            assert g.value(x) == f.value(x)
            assert np.array_equal(g.grad(x), f.grad(x))


def test_trace_roundtrip_and_canonical_json():
    f = random_coverage(6, 15)
    trace = random_greedy_dummies(f, 2, seed=3)
    doc = to_doc(trace)
    again = to_doc(from_doc(doc))
    assert canonical_json(doc) == canonical_json(again)


def test_bundle_roundtrip():
    f = random_coverage(6, 16)
    system = PSystem.from_matroids([random_partition_matroid(6, 17)])
    doc = bundle_doc(2, {"objective": f, "system": system},
                     measured={"gamma": 1.0, "m": 1.0}, meta={"seed": 16})
    bundle = load_bundle(doc)
    assert np.array_equal(bundle["objective"].table(), f.table())
    assert bundle["_measured"]["gamma"] == 1.0
    assert bundle["_problem"] == 2


def test_file_roundtrip(tmp_path):
    f = random_perturbed(6, 0.2, 18)
    path = save(f, tmp_path / "inst.json")
    g = load(path)
    assert np.array_equal(f.table(), g.table())
    # byte-identical re-serialization
    assert save(g, tmp_path / "again.json").read_text() == path.read_text()


def test_unknown_docs_rejected():
    with pytest.raises(ValueError):
        from_doc({"kind": "nonsense"})
    with pytest.raises(TypeError):
        to_doc(object())
