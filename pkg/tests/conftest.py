import numpy as np
import pytest

# Published six-state fixture: one-step transition counts and the per-state
# occupancy over all 278 classified points.  Row 5 of the counts sums to 33
# while its occupancy is 44; the fixture reproduces the source table as
# printed, inconsistencies included.
PUBLISHED_COUNTS = np.array(
    [
        [53, 14, 3, 0, 2, 1],
        [13, 18, 9, 2, 0, 0],
        [4, 9, 12, 3, 1, 0],
        [0, 2, 6, 8, 3, 0],
        [1, 0, 0, 9, 13, 10],
        [0, 0, 0, 0, 23, 48],
    ],
    dtype=int,
)
PUBLISHED_OCCUPANCY = np.array([73, 42, 29, 19, 44, 71], dtype=int)
PUBLISHED_TOTAL = 278


@pytest.fixture
def published_counts():
    return PUBLISHED_COUNTS.copy()


@pytest.fixture
def published_occupancy():
    return PUBLISHED_OCCUPANCY.copy()
