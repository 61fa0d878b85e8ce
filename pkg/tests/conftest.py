"""Shared fixtures: the canonical six-user/three-file worked instance.

The instance: K=6 users, N=3 files (A, B, C), t=2 (cache of one file each),
demand (A,A,B,B,C,C). With lowest-index leaders {1,3,5}, delivery sends 19
of the 20 possible three-user XOR messages, omitting the one for {2,4,6}.
`SIX_USER_TABLE` spells out the expected symbol composition of each message,
worked by hand: subset -> set of (file letter, subfile index subset).
"""

import pytest

CANONICAL_DEMAND = (1, 1, 2, 2, 3, 3)
CANONICAL_N, CANONICAL_K, CANONICAL_T = 3, 6, 2
FILE_LETTERS = {1: "A", 2: "B", 3: "C"}

SIX_USER_TABLE = {
    (1, 2, 3): {("B", (1, 2)), ("A", (1, 3)), ("A", (2, 3))},
    (1, 2, 4): {("B", (1, 2)), ("A", (1, 4)), ("A", (2, 4))},
    (1, 2, 5): {("C", (1, 2)), ("A", (1, 5)), ("A", (2, 5))},
    (1, 2, 6): {("C", (1, 2)), ("A", (1, 6)), ("A", (2, 6))},
    (1, 3, 4): {("B", (1, 3)), ("B", (1, 4)), ("A", (3, 4))},
    (1, 3, 5): {("C", (1, 3)), ("B", (1, 5)), ("A", (3, 5))},
    (1, 3, 6): {("C", (1, 3)), ("B", (1, 6)), ("A", (3, 6))},
    (1, 4, 5): {("C", (1, 4)), ("B", (1, 5)), ("A", (4, 5))},
    (1, 4, 6): {("C", (1, 4)), ("B", (1, 6)), ("A", (4, 6))},
    (1, 5, 6): {("C", (1, 5)), ("C", (1, 6)), ("A", (5, 6))},
    (2, 3, 4): {("B", (2, 3)), ("B", (2, 4)), ("A", (3, 4))},
    (2, 3, 5): {("C", (2, 3)), ("B", (2, 5)), ("A", (3, 5))},
    (2, 3, 6): {("C", (2, 3)), ("B", (2, 6)), ("A", (3, 6))},
    (2, 4, 5): {("C", (2, 4)), ("B", (2, 5)), ("A", (4, 5))},
    (2, 5, 6): {("C", (2, 5)), ("C", (2, 6)), ("A", (5, 6))},
    (3, 4, 5): {("C", (3, 4)), ("B", (3, 5)), ("B", (4, 5))},
    (3, 4, 6): {("C", (3, 4)), ("B", (3, 6)), ("B", (4, 6))},
    (3, 5, 6): {("C", (3, 5)), ("C", (3, 6)), ("B", (5, 6))},
    (4, 5, 6): {("C", (4, 5)), ("C", (4, 6)), ("B", (5, 6))},
}


@pytest.fixture
def canonical_instance():
    from cachekit import batch_placement, make_database

    F = 15
    db = make_database(CANONICAL_N, F, seed=20240817)
    placement = batch_placement(CANONICAL_N, CANONICAL_K, CANONICAL_T, F)
    return db, placement, CANONICAL_DEMAND
