import math

import numpy as np
import pytest
from hypothesis import given

from pentrans.diagram import DiagramError, PersistenceDiagram, finitize
from pentrans.metrics import bottleneck, bottleneck_matching, converged_in_metric
from pentrans.rips import distance_matrix_from_points, vr_persistence

from .conftest import finite_diagrams
from .oracles import bottleneck_oracle


def D(*bars, degree=0):
    return PersistenceDiagram(degree, list(bars))


def test_examples():
    assert bottleneck(D((0, 2)), D()) == 1.0
    assert bottleneck(D((0, 1)), D((0, 1.5))) == 0.5
    assert bottleneck(D(), D()) == 0.0
    assert bottleneck(D((0, 1), (2, 5)), D((2, 5), (0, 1))) == 0.0


def test_errors():
    with pytest.raises(DiagramError, match="degree"):
        bottleneck(D((0, 1)), D((0, 1), degree=1))
    with pytest.raises(DiagramError, match="finitized"):
        bottleneck(D((0, math.inf)), D((0, 1)))


def test_matching_pairs():
    m = bottleneck_matching(D((0, 1), (0, 10)), D((0, 10.25)))
    assert m.cost == 0.5
    assert set(m.pairs) == {((0, 10), (0, 10.25)), ((0, 1), None)}


@given(finite_diagrams(max_size=5), finite_diagrams(max_size=5))
def test_matches_exhaustive_oracle(a, b):
    assert bottleneck(a, b) == pytest.approx(bottleneck_oracle(a.bars, b.bars), abs=1e-9)


@given(finite_diagrams(max_size=6), finite_diagrams(max_size=6), finite_diagrams(max_size=6))
def test_metric_axioms(a, b, c):
    ab = bottleneck(a, b)
    assert ab == bottleneck(b, a)
    assert bottleneck(a, a) == 0.0
    assert bottleneck(a, c) <= ab + bottleneck(b, c) + 1e-12


@given(finite_diagrams(max_size=6), finite_diagrams(max_size=6))
def test_matching_cost_is_realized(a, b):
    m = bottleneck_matching(a, b)
    worst = 0.0
    for left, right in m.pairs:
        if left is None:
            worst = max(worst, right.lifetime / 2)
        elif right is None:
            worst = max(worst, left.lifetime / 2)
        else:
            worst = max(worst, abs(left.birth - right.birth), abs(left.death - right.death))
    assert worst == pytest.approx(m.cost)
    assert sum(p[0] is not None for p in m.pairs) == len(a)
    assert sum(p[1] is not None for p in m.pairs) == len(b)


def test_stability_on_perturbed_matrices(rng):
    for _ in range(10):
        pts = rng.normal(size=(10, 2))
        d = distance_matrix_from_points(pts) + 1.0
        np.fill_diagonal(d, 0)
        noise = rng.uniform(-0.05, 0.05, d.shape)
        noise = np.triu(noise, 1)
        noise += noise.T
        d2 = d + noise
        eta = np.abs(d2 - d).max()
        a, b = vr_persistence(d), vr_persistence(d2)
        for k in (0, 1):
            fa, fb = finitize(a[k], d.max()), finitize(b[k], d2.max())
            assert bottleneck(fa, fb) <= eta + 1e-9


def test_converged_in_metric():
    assert not converged_in_metric([D((0, 2)), D()], 0.5)
    assert converged_in_metric([D((0, 1)), D((0, 1.1))], 0.2)
    with pytest.raises(ValueError):
        converged_in_metric([], 0.1)
