import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pentrans.diagram import (
    DiagramError,
    PersistenceDiagram,
    finitize,
    lifetime_distribution,
    max_lifetime,
    normalized_persistent_entropy,
    persistent_entropy,
    read_diagrams,
    truncate_lifetimes,
    write_diagrams,
)

from .conftest import finite_diagrams
from .oracles import pe_oracle


def D(*bars, degree=0):
    return PersistenceDiagram(degree, list(bars))


def test_single_bar_is_zero():
    assert persistent_entropy(D((0, 1))) == 0.0


def test_empty_diagram_is_zero():
    assert persistent_entropy(D()) == 0.0
    assert normalized_persistent_entropy(D()) == 0.0


def test_two_bar_values():
    # frozen from -0.25 log 0.25 - 0.75 log 0.75 and its ratio to log 2
    assert persistent_entropy(D((0, 1), (0, 3))) == pytest.approx(0.562335, abs=1e-6)
    assert normalized_persistent_entropy(D((0, 1), (0, 3))) == pytest.approx(0.811278, abs=1e-6)


def test_zero_lifetime_bars_do_not_count():
    assert persistent_entropy(D((0, 1), (2, 2), (3, 3))) == 0.0
    assert normalized_persistent_entropy(D((0, 1), (0, 1), (5, 5))) == pytest.approx(1.0)


@pytest.mark.parametrize("m", [2, 3, 7, 64])
def test_equal_bars_reach_log_m(m):
    dgm = D(*[(0.5, 2.0)] * m)
    assert abs(persistent_entropy(dgm) - math.log(m)) <= 1e-12
    assert normalized_persistent_entropy(dgm) == pytest.approx(1.0, abs=1e-12)


def test_infinite_bar_rejected():
    with pytest.raises(DiagramError):
        persistent_entropy(D((0, math.inf)))


@pytest.mark.parametrize("bars", [[(1, 0)], [(math.nan, 1)], [(-math.inf, 1)], [(0, 1, 2)]])
def test_invalid_bars(bars):
    with pytest.raises(DiagramError):
        PersistenceDiagram(0, bars)


def test_bad_degree():
    with pytest.raises(DiagramError):
        PersistenceDiagram(2, [])


def test_diagram_equality_is_multiset():
    assert D((0, 1), (0, 2)) == D((0, 2), (0, 1))
    assert D((0, 1)) != D((0, 1), (0, 1))
    assert D((0, 1)) != D((0, 1), degree=1)


def test_bars_are_read_only():
    dgm = D((0, 1))
    with pytest.raises(ValueError):
        dgm.bars[0, 0] = 5


def test_truncate_examples():
    assert truncate_lifetimes(D((0, 0.01), (0, 2)), 0.1) == D((0, 2))
    out = truncate_lifetimes(D((0, 0.05), (1, 1.04)), 0.1)
    assert len(out) == 0 and persistent_entropy(out) == 0.0
    with pytest.raises(DiagramError):
        truncate_lifetimes(D((0, 1)), -0.1)


def test_truncate_keeps_boundary_and_infinite():
    out = truncate_lifetimes(D((0, 0.5), (0, 0.4), (1, math.inf)), 0.5)
    assert out == D((0, 0.5), (1, math.inf))


def test_finitize():
    out = finitize(D((0, 1), (0, math.inf)), 3.0)
    assert out == D((0, 1), (0, 3))
    assert finitize(D((0, 1)), 3.0) == D((0, 1))
    with pytest.raises(DiagramError):
        finitize(D((2, math.inf)), 1.0)


def test_max_lifetime():
    assert max_lifetime(D()) == 0.0
    assert max_lifetime(D((0, 1), (1, 4), degree=1)) == 3.0


@given(finite_diagrams())
def test_pe_matches_oracle(dgm):
    assert persistent_entropy(dgm) == pytest.approx(pe_oracle(dgm.lifetimes), abs=1e-12)


@given(finite_diagrams(min_size=1), st.sampled_from([1e-3, 1.0, 1e3]))
def test_scale_invariance(dgm, c):
    assert abs(persistent_entropy(dgm.scaled(c)) - persistent_entropy(dgm)) <= 1e-12


@given(finite_diagrams())
def test_pe_bounds(dgm):
    m = int((dgm.lifetimes > 0).sum())
    pe = persistent_entropy(dgm)
    assert pe >= 0.0
    if m > 0:
        assert pe <= math.log(m) + 1e-12
    npe = normalized_persistent_entropy(dgm)
    assert 0.0 <= npe <= 1.0


@given(finite_diagrams(min_size=1))
def test_longest_bar_bound(dgm):
    p = lifetime_distribution(dgm)
    if len(p) == 0:
        return
    ps = float(p.max())
    assert persistent_entropy(dgm) >= -ps * math.log(ps) - 1e-12


@given(finite_diagrams(), st.floats(0, 6))
def test_truncation_is_idempotent_and_monotone(dgm, tau):
    once = truncate_lifetimes(dgm, tau)
    assert truncate_lifetimes(once, tau) == once
    assert len(once) <= len(dgm)
    assert (once.lifetimes >= tau).all()


@given(finite_diagrams(degree=0), finite_diagrams(degree=1))
def test_csv_round_trip(tmp_path_factory, d0, d1):
    path = tmp_path_factory.mktemp("dgm") / "d.csv"
    write_diagrams(path, [d0, d1])
    back = read_diagrams(path)
    assert back.get(0, PersistenceDiagram(0)) == d0
    assert back.get(1, PersistenceDiagram(1)) == d1


def test_csv_infinity_and_bad_rows(tmp_path):
    path = tmp_path / "d.csv"
    write_diagrams(path, [D((0, 0.1), (0, math.inf))])
    assert path.read_text() == "degree,birth,death\n0,0.0,0.1\n0,0.0,inf\n"
    assert read_diagrams(path)[0].has_infinite
    path.write_text("degree,birth,death\n0,1,oops\n")
    with pytest.raises(DiagramError, match="d.csv:2"):
        read_diagrams(path)
    path.write_text("a,b\n")
    with pytest.raises(DiagramError, match="header"):
        read_diagrams(path)
