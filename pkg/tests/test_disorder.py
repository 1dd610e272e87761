import json

import numpy as np
import pytest

from gaugewalk.disorder import (
    DisorderConfig,
    DisorderRealization,
    derive_seed,
    dress,
    sample_disorder,
)
from gaugewalk.lattice import LatticeSpec
from gaugewalk.operators import beam_splitter_x, beam_splitter_y, build_step, unitarity_error


def test_zero_delta():
    r = sample_disorder(LatticeSpec(8), DisorderConfig(0.0, 3))
    assert not r.all_phases().any()


def test_deterministic():
    spec = LatticeSpec(10)
    a = sample_disorder(spec, DisorderConfig(0.2, 42))
    b = sample_disorder(spec, DisorderConfig(0.2, 42))
    for pa, pb in zip(a.phases, b.phases):
        assert pa.tobytes() == pb.tobytes()


def test_one_pair_per_coupler():
    spec = LatticeSpec(6)
    r = sample_disorder(spec, DisorderConfig(0.1, 1))
    n_couplers = sum(1 for _ in build_step(spec).blocks())
    assert r.all_phases().size == 2 * n_couplers


def test_sample_statistics():
    r = sample_disorder(LatticeSpec(30), DisorderConfig(0.2, 2024))
    eps = r.all_phases()
    n = eps.size
    assert abs(eps.mean()) < 3 * 0.2 / np.sqrt(n)
    assert abs(eps.std(ddof=1) - 0.2) < 0.05 * 0.2


def test_seeds_differ():
    spec = LatticeSpec(6)
    a = sample_disorder(spec, DisorderConfig(0.1, 7)).all_phases()
    b = sample_disorder(spec, DisorderConfig(0.1, 8)).all_phases()
    assert not np.array_equal(a, b)
    assert derive_seed(7, 0) != derive_seed(7, 1)
    assert derive_seed(7, 3) == derive_seed(7, 3)


def test_dress_examples():
    v = beam_splitter_x()
    np.testing.assert_array_equal(dress(v, 0.0, 0.0), v)
    d = dress(v, np.pi, 0.0)
    np.testing.assert_allclose(d[0], -v[0], atol=1e-15)
    np.testing.assert_allclose(d[1], v[1])
    np.testing.assert_allclose(np.abs(dress(v, 0.4, -1.1)), np.abs(v))


def test_dress_unitarity_bulk():
    rng = np.random.default_rng(0)
    thetas = rng.uniform(-np.pi, np.pi, 10_000)
    eps = rng.normal(0, 1, (10_000, 2))
    worst = max(unitarity_error(dress(beam_splitter_y(t), *e)) for t, e in zip(thetas, eps))
    assert worst < 1e-12


def test_json_round_trip():
    spec = LatticeSpec(4)
    r = sample_disorder(spec, DisorderConfig(0.15, 99))
    doc = json.loads(r.to_json())
    assert doc["seed"] == 99 and doc["delta"] == 0.15
    assert len(doc["couplers"]) == 24
    back = DisorderRealization.from_json(r.to_json())
    for pa, pb in zip(r.phases, back.phases):
        np.testing.assert_array_equal(pa, pb)


def test_config_validation():
    with pytest.raises(ValueError):
        DisorderConfig(-0.1, 0)
    with pytest.raises(ValueError):
        DisorderConfig(0.1, 2**64)
