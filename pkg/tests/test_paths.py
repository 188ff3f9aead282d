from fractions import Fraction

import pytest

from wignercorr import paths
from wignercorr.errors import CapacityError, DomainError
from wignercorr.laws import gaussian, get_law, rademacher, three_point
from oracles import direct_covariance

LAWS = ["gaussian", "rademacher", "three-point:1/4"]


def test_single_diagonal_walk_weight():
    pair = paths.PathPair.of((1, 1), (1, 1))
    assert paths.weight(pair, gaussian(), 1) == Fraction(3, 16)
    assert paths.connected_weight(pair, gaussian(), 1) == Fraction(3, 16) - Fraction(1, 16)


def test_closed_forms_small():
    assert paths.covariance_bruteforce(1, 1, 1, gaussian()) == Fraction(1, 8)
    assert paths.covariance_bruteforce(2, 1, 1, gaussian()) == Fraction(1, 8)
    assert paths.covariance_bruteforce(1, 1, 1, rademacher()) == 0


@pytest.mark.parametrize("law", LAWS)
@pytest.mark.parametrize("n,s1,s2", [(1, 1, 1), (2, 1, 2), (2, 2, 2), (3, 1, 1)])
def test_partition_equals_routes_and_direct(n, s1, s2, law):
    L = get_law(law)
    part = paths.sum_by_class(n, s1, s2, L)
    assert part["total"] == sum(part[c] for c in paths.CLASSES)
    assert part["total"] == paths.covariance_bruteforce(n, s1, s2, L) == direct_covariance(n, s1, s2, law)


def test_second_moment_subsum_is_law_independent():
    vals = {law: paths.sum_by_class(3, 2, 2, get_law(law))["only-multiplicity-2"] for law in LAWS}
    assert len(set(vals.values())) == 1
    assert vals["gaussian"] == Fraction(1, 216)


def test_simply_correlated_class_depends_on_fourth_moment():
    got = [paths.sum_by_class(2, 2, 2, get_law(law))["simply-correlated"] for law in LAWS]
    assert got == [Fraction(1, 128), Fraction(1, 256), Fraction(5, 512)]


def test_classification_labels():
    assert paths.classify(paths.PathPair.of((1, 2), (3, 3))).label == "no-common-step"
    cl = paths.classify(paths.PathPair.of((1, 2, 3, 3), (2, 1, 3, 3)))
    assert cl.label == "simply-correlated" and cl.instants == (0, 0)
    assert paths.classify(paths.PathPair.of((1, 2, 2, 2), (2, 1, 3, 3))).label == "other"
    assert paths.classify(paths.PathPair.of((1, 2), (1, 2))).label == "multiplicity-4+"
    assert paths.classify(paths.PathPair.of((1, 2, 2, 2), (1, 2))).label == "multiplicity-4+"


def test_reduction_length_and_weight():
    law = gaussian()
    pair = paths.PathPair.of((1, 2, 3, 3), (2, 1, 3, 3))
    red = paths.reduce_two_steps(pair)
    assert red.vertices == (1, 3, 3, 2, 3, 3)
    assert 4 * 3 * paths.weight(pair, law, 3) == paths.path_weight(red, law, 3) != 0


def test_reduction_rejects_same_orientation():
    with pytest.raises(DomainError):
        paths.reduce_two_steps(paths.PathPair.of((1, 2, 2, 2), (1, 2, 2, 2)))
    with pytest.raises(DomainError):
        paths.reduce_two_steps(paths.PathPair.of((1, 2), (1, 2)))


@pytest.mark.parametrize("law", [gaussian(), rademacher(), three_point()])
def test_reduction_report_passes(law):
    rep = paths.reduction_report(2, 2, 2, law)
    assert rep["pass"] and rep["checked"] > 0


def test_capacity_guard():
    with pytest.raises(CapacityError):
        paths.sum_by_class(4, 1, 1, gaussian())
    with pytest.raises(CapacityError):
        paths.covariance_routes(2, 3, 2, gaussian())


def test_parallel_chunks_agree():
    a = paths.sum_by_class(2, 1, 2, "three-point:1/4")
    b = paths.sum_by_class(2, 1, 2, three_point(), workers=2)
    assert a == b


def test_pair_records_nonzero():
    recs = list(paths.iter_pair_records(2, 1, 1, gaussian()))
    assert recs and all(Fraction(r["weight"]) != 0 for r in recs)
    assert sum(Fraction(r["weight"]) for r in recs) == Fraction(1, 8)
