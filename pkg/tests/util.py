"""Shared helpers for the test suite."""
from fractions import Fraction
import random

from celldof import RationalMatrix, Topology, complete_kpartite


def power_columns(pm):
    """Map (current mode, voltage mode) -> coefficient column."""
    return {
        (lab.current_mode, lab.voltage_mode): pm.coeffs.col(j)
        for j, lab in enumerate(pm.labels)
    }


def frac_rows(rows):
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


def mat(rows, ncols=None):
    return RationalMatrix(rows, ncols=ncols)


def random_sizes(rng: random.Random, max_n: int = 12):
    """Random partition-size list with at most max_n total vertices."""
    while True:
        k = rng.randint(1, 4)
        sizes = [rng.randint(1, 4) for _ in range(k)]
        if sum(sizes) <= max_n:
            return sizes


def random_kpartite(rng: random.Random, max_n: int = 12) -> Topology:
    return complete_kpartite(random_sizes(rng, max_n))


def random_fraction(rng: random.Random, span: int = 9) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, span))
