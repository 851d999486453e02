import numpy as np
import pytest

from invopt import Dataset, LpInstance, PointSetInstance, SchedulingInstance, SimplexSpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_spec():
    return SimplexSpec(2, 0.0)


@pytest.fixture
def two_point_dataset(unit_spec):
    """Two observations on the two-vertex outcome set {(1,0),(0,1)}.

    Generated by true weights (1/2, 1/2): the tie makes both vertices
    optimal, one observation picks each.
    """
    pts = PointSetInstance([[1.0, 0.0], [0.0, 1.0]])
    entries = [(pts, np.array([1.0, 0.0])), (pts, np.array([0.0, 1.0]))]
    return Dataset(simplex=unit_spec, entries=entries)


@pytest.fixture
def sched2():
    return SchedulingInstance(r=[0.0, 0.0], p=[2.0, 1.0])


@pytest.fixture
def sched2_dataset(sched2, unit_spec):
    # observed at true weights (1/2, 1/2): order (job2, job1), outcome (-3, -1)
    return Dataset(simplex=unit_spec, entries=[(sched2, np.array([-3.0, -1.0]))])


@pytest.fixture
def triangle():
    # x1 + x2 <= 1, x >= 0
    return LpInstance(r=[1.0, 1.0], B=[[1.0, 1.0]])


@pytest.fixture
def box():
    # x1 <= 1, x2 <= 1, x >= 0
    return LpInstance(r=[1.0, 1.0], B=[[1.0, 0.0], [0.0, 1.0]])
