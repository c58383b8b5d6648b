import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oilfed.errors import ConfigError
from oilfed.stats import NormalDist
from oilfed.taskmodel import TaskType, Urgency, assign_deadline, avg_completion_over_edges


def ttype(beta=1.0, alpha=1.0, eps=0.5, mean=2000.0):
    return TaskType(0, "x", Urgency.URGENT, NormalDist(mean, mean / 5), 200.0, 0.0, beta, alpha, eps)


@pytest.mark.parametrize(
    "arrival,beta,avg,alpha,d_comm,eps,expected",
    [
        (10, 1.0, 2, 1.0, 0.57, 0.5, 13.07),
        (0, 2.0, 1, 0.0, 123.0, 0.0, 2.0),
        (100, 1.5, 4, 1.0, 0.01, 0.25, 106.26),
    ],
)
def test_assign_deadline_examples(arrival, beta, avg, alpha, d_comm, eps, expected):
    assert assign_deadline(arrival, ttype(beta, alpha, eps), avg, d_comm) == pytest.approx(expected, abs=1e-12)


def test_assign_deadline_rejects_bad_avg():
    with pytest.raises(ConfigError):
        assign_deadline(0.0, ttype(), 0.0, 0.1)


@given(
    st.floats(0, 1e4),
    st.floats(0.1, 5),
    st.floats(0, 5),
    st.floats(0, 2),
    st.floats(0.01, 100),
    st.floats(0, 10),
)
def test_assign_deadline_affine_slopes(arrival, beta, alpha, eps, avg, d_comm):
    t = ttype(beta, alpha, eps)
    h = 0.5
    d0 = assign_deadline(arrival, t, avg, d_comm)
    assert (assign_deadline(arrival, t, avg + h, d_comm) - d0) / h == pytest.approx(beta, rel=1e-6, abs=1e-6)
    assert (assign_deadline(arrival, t, avg, d_comm + h) - d0) / h == pytest.approx(alpha, rel=1e-6, abs=1e-6)
    assert d0 - arrival >= eps - 1e-9
    assert d0 > arrival


def test_avg_completion_examples():
    assert avg_completion_over_edges(ttype(mean=2000.0), [1000.0, 2000.0]) == 1.5
    assert avg_completion_over_edges(ttype(mean=1800.0), [1800.0]) == 1.0
    # (3000/1500 + 3000/2000 + 3000/2500) / 3 = (2 + 1.5 + 1.2) / 3
    assert avg_completion_over_edges(ttype(mean=3000.0), [1500, 2000, 2500]) == pytest.approx(4.7 / 3, abs=1e-12)


def test_avg_completion_permutation_invariant():
    speeds = [1500.0, 1733.3, 2012.9, 2500.0]
    vals = {round(avg_completion_over_edges(ttype(), p), 12) for p in itertools.permutations(speeds)}
    assert len(vals) == 1


def test_avg_completion_errors():
    with pytest.raises(ConfigError):
        avg_completion_over_edges(ttype(), [])
    with pytest.raises(ConfigError):
        avg_completion_over_edges(ttype(), [1000.0, 0.0])


@pytest.mark.parametrize(
    "kwargs",
    [dict(length_dist=NormalDist(0.0, 0.0)), dict(beta=0.0), dict(alpha=-1.0), dict(epsilon=-0.1), dict(input_size_kb=-1.0)],
)
def test_task_type_invariants(kwargs):
    base = dict(id=0, name="x", urgency=Urgency.URGENT, length_dist=NormalDist(100.0, 10.0), input_size_kb=1.0)
    base.update(kwargs)
    with pytest.raises(ConfigError):
        TaskType(**base)
