import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import dominant_eigvec_2x2

from bdscv.cv import canonical_order
from bdscv.datasets import Dataset, make_artificial
from bdscv.errors import DegenerateProjectionError, InvalidInputError, InvalidSpecError
from bdscv.projection import (
    ProjectionMethod,
    ProjectionResult,
    ProjectionSpec,
    dominant_eigenvector,
    preprocess,
    project,
    second_moment,
    sort_by_projection,
)

PCA = ProjectionSpec(ProjectionMethod.PCA)
TSVD = ProjectionSpec(ProjectionMethod.TSVD)

matrices = arrays(
    float,
    st.tuples(st.integers(3, 30), st.integers(1, 5)),
    elements=st.floats(-100, 100, allow_nan=False),
)


def test_duplicate_column_loadings():
    x = np.array([[1.0, 1.0], [2.0, 2.0], [4.0, 4.0]])
    r = project(x)
    assert np.allclose(r.loadings, [np.sqrt(2) / 2] * 2)


def test_constant_column_gets_zero_loading():
    x = np.array([[1.0, 7.0], [2.0, 7.0], [5.0, 7.0], [3.0, 7.0]])
    r = project(x)
    assert r.loadings[1] == 0.0 and r.loadings[0] == pytest.approx(1.0)


def test_2x2_against_closed_form():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(200, 2)) @ np.array([[2.0, 0.3], [0.0, 0.5]])
    spec = ProjectionSpec(PCA.method, standardize=False)
    r = project(x, spec)
    c = second_moment(preprocess(x, spec))
    assert np.allclose(r.loadings, dominant_eigvec_2x2(c), atol=1e-7)


@settings(max_examples=150, deadline=None)
@given(matrices, st.sampled_from([PCA, TSVD]))
def test_eigenpair_properties(x, spec):
    if np.all(x.max(axis=0) == x.min(axis=0)):
        with pytest.raises(DegenerateProjectionError):
            project(x, spec)
        return
    try:
        r = project(x, spec)
    except DegenerateProjectionError:
        return
    c = second_moment(preprocess(x, spec))
    assert np.linalg.norm(r.loadings) == pytest.approx(1.0)
    eig = np.linalg.eigvalsh(c)
    residual = np.linalg.norm(c @ r.loadings - r.eigenvalue * r.loadings)
    if eig.size == 1 or (eig[-2] / eig[-1]) ** (spec.max_iterations / 2) < 1e-12:
        # the gap is wide enough for the iteration cap
        assert residual <= 10 * spec.tolerance * np.linalg.norm(c) + 1e-12
    assert np.allclose(r.scores, preprocess(x, spec) @ r.loadings)
    lead = np.flatnonzero(np.abs(r.loadings) >= np.abs(r.loadings).max() - 1e-12)[0]
    assert r.loadings[lead] > 0
    # dominant: no eigenvalue of c is meaningfully larger
    assert r.eigenvalue >= eig.max() * (1 - 1e-6) - 1e-9


def test_dominant_eigenvector_diagonal():
    lam, v, _ = dominant_eigenvector(np.diag([1.0, 3.0, 2.0]))
    assert lam == pytest.approx(3.0) and np.allclose(v, [0, 1, 0])


def test_start_vector_in_null_space():
    # all-ones start is orthogonal to the dominant direction
    c = np.array([[1.0, -1.0], [-1.0, 1.0]])
    lam, v, _ = dominant_eigenvector(c)
    assert lam == pytest.approx(2.0)
    assert np.allclose(np.abs(v), [np.sqrt(0.5)] * 2)


def test_all_constant_rejected():
    with pytest.raises(DegenerateProjectionError):
        project(np.ones((5, 3)))


@pytest.mark.parametrize("x", [np.ones(4), np.ones((1, 3)), np.array([[1.0, np.nan], [2.0, 3.0]])])
def test_bad_input(x):
    with pytest.raises(InvalidInputError):
        project(x)


@pytest.mark.parametrize("kwargs", [dict(max_iterations=0), dict(tolerance=0.0)])
def test_bad_spec(kwargs):
    with pytest.raises(InvalidSpecError):
        ProjectionSpec(**kwargs)


def test_tsvd_does_not_centre():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(50, 3))
    shifted = x + np.array([10.0, 0.0, 0.0])
    assert np.allclose(project(x, PCA).loadings, project(shifted, PCA).loadings)
    assert not np.allclose(project(x, TSVD).loadings, project(shifted, TSVD).loadings)


def test_column_permutation_permutes_loadings():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(60, 4)) @ rng.normal(size=(4, 4))
    perm = [2, 0, 3, 1]
    a, b = project(x), project(x[:, perm])
    assert np.allclose(a.loadings[perm], b.loadings, atol=1e-6)
    assert np.allclose(a.scores, b.scores, atol=1e-6)


def _result(scores):
    scores = np.asarray(scores, dtype=float)
    return ProjectionResult(np.ones(1), scores, 1.0, 1, PCA)


def test_sort_by_projection():
    ds = Dataset("t", [[0.0], [1.0], [2.0]], ["a", "b", "c"])
    s = sort_by_projection(ds, _result([0.3, 0.1, 0.2]))
    assert s.order.tolist() == [1, 2, 0]
    assert s.dataset.labels.tolist() == ["b", "c", "a"]
    assert sort_by_projection(ds, _result([1.0, 1.0, 1.0])).order.tolist() == [0, 1, 2]
    with pytest.raises(InvalidInputError):
        sort_by_projection(ds, _result([0.1, 0.2]))


def test_artificial_duplicates_adjacent_after_sort():
    art = make_artificial(5)
    base = art.take(canonical_order(art))
    s = sort_by_projection(base, project(base.features))
    rows = [tuple(r) for r in s.dataset.features]
    # each of the ten distinct rows occupies one run of five positions
    runs = [rows[i:i + 5] for i in range(0, 50, 5)]
    assert all(len(set(run)) == 1 for run in runs)
    assert len({run[0] for run in runs}) == 10
