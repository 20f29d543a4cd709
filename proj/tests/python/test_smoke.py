"""Smoke tests for the Python bindings: the compiled module must expose the
main operations and agree with known values."""

import json

import numpy as np
import pytest

try:
    import aschern as m
except ImportError:
    import _aschern as m


def test_regular_representation_z3():
    lams = m.regular_representation("Z3")
    assert len(lams) == 3
    table = m.group_table("Z3")
    for g in range(3):
        for h in range(3):
            np.testing.assert_allclose(lams[g] @ lams[h], lams[table[g][h]], atol=1e-14)
    assert abs(m.normalized_trace(lams[0]) - 1.0) < 1e-14
    assert abs(m.normalized_trace(lams[1])) < 1e-14


def test_contour_spectral_projection_and_idempotent():
    a = np.diag([0.1, 0.9]).astype(complex)
    e = m.contour_spectral_projection(a, 64)
    np.testing.assert_allclose(e, np.diag([0.0, 1.0]), atol=1e-10)

    idem = np.array([[1.0, 1.0], [0.0, 0.0]], dtype=complex)
    p = m.idempotent_to_projection(idem)
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    assert abs(np.trace(p) - np.trace(idem)) < 1e-10


def test_cover_lemma():
    points = [[float(i), 0.0] for i in range(40)]
    family = [[0, 1, 2, 3], [2, 3, 4], [30, 31]]
    assert m.cover_lemma_violations(points, family) == 0


def test_run_task_selftest():
    result = m.run_task(json.dumps({"task": "selftest", "seed": 1}))
    assert result["exit_code"] == 0
    summary = json.loads(result["summary"])
    assert summary["pass"] is True


def test_run_task_config_error():
    with pytest.raises(m.ConfigError):
        m.run_task(json.dumps({"task": "warp"}))


@pytest.mark.slow
def test_bott_chern_pairing():
    pairing = m.bott_chern_pairing(subdiv=2)
    assert abs(pairing - 1.0) < 0.05
