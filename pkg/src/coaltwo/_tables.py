"""Closed-form entries of the 13-state two-locus transition matrix.

One expression per (row, column); absent pairs are zero. Columns are
indexed 0..11 for q1..q12 and 12 for the absorbing state q0.
"""
from __future__ import annotations

from fractions import Fraction

Q0 = 12


def general_rows(N: int, s: Fraction, r: Fraction) -> list[dict[int, Fraction]]:
    N = Fraction(N)
    t = 1 - s
    u = 1 - r
    R = u * u + r * r
    rows: list[dict[int, Fraction]] = []

    # q1
    rows.append({
        0: (N - 1) * (N - 2) * (N - 3) / N**3,
        1: (N - 1) * (N - 2) / (2 * N**3),
        2: (N - 1) * (N - 2) / (2 * N**3),
        3: 2 * (N - 1) * (N - 2) / N**3,
        4: (N - 1) / (4 * N**3),
        5: (N - 1) / (2 * N**3),
        6: 2 * (N - 1) * (N - 2) / N**3,
        7: (N - 1) / N**3,
        8: (N - 1) / N**3,
        9: (N - 1) / N**3,
        10: (N - 1) / (2 * N**3),
        11: 1 / (4 * N**3),
        Q0: 1 / N - 1 / (4 * N**2),
    })
    # q2
    rows.append({
        0: t * (N - 2) * (N - 3) / N**2,
        1: s * (N - 1) * (N - 2) / (2 * N**2),
        2: t * (N - 2) / (2 * N**2),
        3: 2 * t * (N - 2) / N**2,
        4: s * (N - 1) / (4 * N**2),
        5: t / (2 * N**2),
        6: 2 * t * (N - 2) / N**2,
        7: s * (N - 1) / N**2,
        8: t / N**2,
        9: t / N**2,
        10: t / (2 * N**2),
        11: s / (4 * N**2),
        Q0: s / 2 + (2 - s) / (4 * N),
    })
    # q3: locus-swap image of q2. The general table prints the q10 and q11
    # entries exchanged; the r=0 and r=1/2 tables and the enumeration agree
    # on the values below.
    rows.append({
        0: t * (N - 2) * (N - 3) / N**2,
        1: t * (N - 2) / (2 * N**2),
        2: s * (N - 1) * (N - 2) / (2 * N**2),
        3: 2 * t * (N - 2) / N**2,
        4: s * (N - 1) / (4 * N**2),
        5: t / (2 * N**2),
        6: 2 * t * (N - 2) / N**2,
        7: t / N**2,
        8: s * (N - 1) / N**2,
        9: t / N**2,
        10: t / (2 * N**2),
        11: s / (4 * N**2),
        Q0: s / 2 + (2 - s) / (4 * N),
    })
    # q4
    rows.append({
        0: t * (N - 2) * (N - 3) / N**2,
        1: t * (N - 2) / (2 * N**2),
        2: t * (N - 2) / (2 * N**2),
        3: s * (N - 1) * (N - 2) / (2 * N**2) + 3 * t * (N - 2) / (2 * N**2),
        4: t / (4 * N**2),
        5: t / (4 * N**2) + s * (N - 1) / (4 * N**2),
        6: s * (N - 1) * (N - 2) / (2 * N**2) + 3 * t * (N - 2) / (2 * N**2),
        7: s * (N - 1) / (2 * N**2) + t / (2 * N**2),
        8: s * (N - 1) / (2 * N**2) + t / (2 * N**2),
        9: s * (N - 1) / (2 * N**2) + t / (2 * N**2),
        10: s * (N - 1) / (4 * N**2) + t / (4 * N**2),
        11: s / (4 * N**2),
        Q0: 1 / N - 1 / (4 * N**2),
    })
    # q5
    rows.append({
        0: t**2 * (N - 2) * (N - 3) / (N * (N - 1)),
        1: s * t * (N - 2) / (2 * N),
        2: s * t * (N - 2) / (2 * N),
        3: 2 * t**2 * (N - 2) / (N * (N - 1)),
        4: s**2 * (N - 1) / (4 * N),
        5: t**2 / (2 * N * (N - 1)),
        6: 2 * t**2 * (N - 2) / (N * (N - 1)),
        7: s * t / N,
        8: s * t / N,
        9: t**2 / (N * (N - 1)),
        10: t**2 / (2 * N * (N - 1)),
        11: s**2 / (4 * N),
        Q0: s - s**2 / 4,
    })
    # q6
    rows.append({
        0: t**2 * (N - 2) * (N - 3) / (N * (N - 1)),
        1: t**2 * (N - 2) / (2 * N * (N - 1)),
        2: t**2 * (N - 2) / (2 * N * (N - 1)),
        3: s * t * (N - 2) / N + t**2 * (N - 2) / (N * (N - 1)),
        4: t**2 / (4 * N * (N - 1)),
        5: t**2 / (4 * N * (N - 1)) + s**2 * (N - 1) / (4 * N),
        6: s * t * (N - 2) / N + t**2 * (N - 2) / (N * (N - 1)),
        7: s * t / N,
        8: s * t / N,
        9: s**2 * (N - 1) / (2 * N) + t**2 / (2 * N * (N - 1)),
        10: s**2 * (N - 1) / (4 * N) + t**2 / (4 * N * (N - 1)),
        11: s**2 / (4 * N),
        Q0: 1 / N - s**2 / (4 * N) - t**2 / (4 * N * (N - 1)),
    })
    # q7
    rows.append({
        3: r * (N - 1) * (N - 2) / N**2,
        5: r / (2 * N) * (1 - 1 / N),
        6: u * (N - 1) * (N - 2) / N**2,
        7: (N - 1) / (2 * N**2),
        8: (N - 1) / (2 * N**2),
        9: (N - 1) / (2 * N**2),
        10: u * (N - 1) / (2 * N**2),
        11: 1 / (4 * N**2),
        Q0: 1 / N - 1 / (4 * N**2),
    })
    # q8
    rows.append({
        3: r * t * (N - 2) / N,
        5: r * t / (2 * N),
        6: u * t * (N - 2) / N,
        7: s * (N - 1) / (2 * N),
        8: t / (2 * N),
        9: t / (2 * N),
        10: u * t / (2 * N),
        11: s / (4 * N),
        Q0: s / 2 + (2 - s) / (4 * N),
    })
    # q9
    rows.append({
        3: r * t * (N - 2) / N,
        5: r * t / (2 * N),
        6: u * t * (N - 2) / N,
        7: t / (2 * N),
        8: s * (N - 1) / (2 * N),
        9: t / (2 * N),
        10: u * t / (2 * N),
        11: s / (4 * N),
        Q0: s / 2 + (2 - s) / (4 * N),
    })
    # q10
    rows.append({
        3: r * t * (N - 2) / N,
        5: r * s * (N - 1) / (2 * N),
        6: u * t * (N - 2) / N,
        7: t / (2 * N),
        8: t / (2 * N),
        9: s * (N - 1) / (2 * N),
        10: u * s * (N - 1) / (2 * N),
        11: s / (4 * N),
        Q0: (4 - s) / (4 * N),
    })
    # q11
    rows.append({
        5: r**2 * (N - 1) / N,
        9: 2 * r * u * (N - 1) / N,
        10: u**2 * (N - 1) / N,
        11: R / (2 * N),
        Q0: (-2 * r**2 + 2 * r + 1) / (2 * N),
    })
    # q12
    rows.append({
        5: r**2 * t,
        9: 2 * r * u * t,
        10: u**2 * t,
        11: R * s / 2,
        Q0: s * (-2 * r**2 + 2 * r + 1) / 2,
    })
    return rows


def total_selfing_rows(N: int, r: Fraction) -> list[dict[int, Fraction]]:
    """Rows printed for s = 1."""
    N = Fraction(N)
    u = 1 - r
    R = u * u + r * r
    rows = general_rows(N, Fraction(1), r)[:1]
    rows.append({1: (N - 1) * (N - 2) / (2 * N**2), 4: (N - 1) / (4 * N**2),
                 7: (N - 1) / N**2, 11: 1 / (4 * N**2), Q0: (2 * N + 1) / (4 * N)})
    rows.append({2: (N - 1) * (N - 2) / (2 * N**2), 4: (N - 1) / (4 * N**2),
                 8: (N - 1) / N**2, 11: 1 / (4 * N**2), Q0: (2 * N + 1) / (4 * N)})
    rows.append({3: (N - 1) * (N - 2) / (2 * N**2), 5: (N - 1) / (4 * N**2),
                 6: (N - 2) * (N - 1) / (2 * N**2), 7: (N - 1) / (2 * N**2),
                 8: (N - 1) / (2 * N**2), 9: (N - 1) / (2 * N**2),
                 10: (N - 1) / (4 * N**2), 11: 1 / (4 * N**2),
                 Q0: (4 * N - 1) / (4 * N**2)})
    rows.append({4: (N - 1) / (4 * N), 11: 1 / (4 * N), Q0: Fraction(3, 4)})
    rows.append({5: (N - 1) / (4 * N), 9: (N - 1) / (2 * N), 10: (N - 1) / (4 * N),
                 11: 1 / (4 * N), Q0: 3 / (4 * N)})
    rows.append({3: r * (N - 1) * (N - 2) / N**2, 5: r * (N - 1) / (2 * N**2),
                 6: (N - 1) * (N - 2) * u / N**2, 7: (N - 1) / (2 * N**2),
                 8: (N - 1) / (2 * N**2), 9: (N - 1) / (2 * N**2),
                 10: (N - 1) * u / (2 * N**2), 11: 1 / (4 * N**2),
                 Q0: (4 * N - 1) / (4 * N**2)})
    rows.append({7: (N - 1) / (2 * N), 11: 1 / (4 * N), Q0: (1 + 2 * N) / (4 * N)})
    rows.append({8: (N - 1) / (2 * N), 11: 1 / (4 * N), Q0: (1 + 2 * N) / (4 * N)})
    rows.append({5: r * (N - 1) / (2 * N), 9: (N - 1) / (2 * N),
                 10: (N - 1) * u / (2 * N), 11: 1 / (4 * N), Q0: 3 / (4 * N)})
    # q11 -> q6 is printed over N^2; the row only sums to one over N, which
    # is also the r-only general entry.
    rows.append({5: r**2 * (N - 1) / N, 9: 2 * r * u * (N - 1) / N,
                 10: (N - 1) * u**2 / N, 11: R / (2 * N),
                 Q0: (1 + 2 * r - 2 * r**2) / (2 * N)})
    rows.append({11: R / 2, Q0: (1 + 2 * r - 2 * r**2) / 2})
    return rows


def _unlinked_upper_rows(N: Fraction, s: Fraction) -> list[dict[int, Fraction]]:
    """Rows q2..q6 printed identically for r = 0 and r = 1/2."""
    t = 1 - s
    a = N * s - 2 * s + 1
    rows = []
    rows.append({0: (N - 2) * (N - 3) * t / N**2, 1: s * (N - 1) * (N - 2) / (2 * N**2),
                 2: (N - 2) * t / (2 * N**2), 3: 2 * (N - 2) * t / N**2,
                 4: s * (N - 1) / (4 * N**2), 5: t / (2 * N**2),
                 6: 2 * (N - 2) * t / N**2, 7: s * (N - 1) / N**2, 8: t / N**2,
                 9: t / N**2, 10: t / (2 * N**2), 11: s / (4 * N**2),
                 Q0: (2 * N * s - s + 2) / (4 * N)})
    rows.append({0: (N - 2) * (N - 3) * t / N**2, 1: (N - 2) * t / (2 * N**2),
                 2: s * (N - 1) * (N - 2) / (2 * N**2), 3: 2 * (N - 2) * t / N**2,
                 4: s * (N - 1) / (4 * N**2), 5: t / (2 * N**2),
                 6: 2 * (N - 2) * t / N**2, 7: t / N**2, 8: s * (N - 1) / N**2,
                 9: t / N**2, 10: t / (2 * N**2), 11: s / (4 * N**2),
                 Q0: (2 * N * s - s + 2) / (4 * N)})
    rows.append({0: (N - 2) * (N - 3) * t / N**2, 1: (N - 2) * t / (2 * N**2),
                 2: (N - 2) * t / (2 * N**2), 3: (N - 2) * (N * s - 4 * s + 3) / (2 * N**2),
                 4: t / (4 * N**2), 5: a / (4 * N**2),
                 6: (N - 2) * (N * s - 4 * s + 3) / (2 * N**2), 7: a / (2 * N**2),
                 8: a / (2 * N**2), 9: a / (2 * N**2), 10: a / (4 * N**2),
                 11: s / (4 * N**2), Q0: (4 * N - 1) / (4 * N**2)})
    rows.append({0: (N - 2) * (N - 3) * t**2 / (N * (N - 1)), 1: s * (N - 2) * t / (2 * N),
                 2: s * (N - 2) * t / (2 * N), 3: 2 * (N - 2) * t**2 / (N * (N - 1)),
                 4: s**2 * (N - 1) / (4 * N), 5: t**2 / (2 * N * (N - 1)),
                 6: 2 * (N - 2) * t**2 / (N * (N - 1)), 7: s * t / N, 8: s * t / N,
                 9: t**2 / (N * (N - 1)), 10: t**2 / (2 * N * (N - 1)),
                 11: s**2 / (4 * N), Q0: (4 - s) * s / 4})
    rows.append({0: (N - 2) * (N - 3) * t**2 / (N * (N - 1)),
                 1: (N - 2) * t**2 / (2 * N * (N - 1)), 2: (N - 2) * t**2 / (2 * N * (N - 1)),
                 3: (N - 2) * t * a / (N * (N - 1)), 4: t**2 / (4 * N * (N - 1)),
                 5: t**2 / (2 * N * (2 * N - 2)) + s**2 * (N - 1) / (4 * N),
                 6: (N - 2) * t * a / (N * (N - 1)), 7: s * t / N, 8: s * t / N,
                 9: t**2 / (2 * N * (N - 1)) + s**2 * (N - 1) / (2 * N),
                 10: t**2 / (2 * N * (2 * N - 2)) + s**2 * (N - 1) / (4 * N),
                 11: s**2 / (4 * N),
                 Q0: (4 - s**2) / (4 * N) - t**2 / (4 * N * (N - 1))})
    return rows


def no_recombination_rows(N: int, s: Fraction) -> list[dict[int, Fraction]]:
    """Rows printed for r = 0."""
    N = Fraction(N)
    t = 1 - s
    rows = general_rows(N, s, Fraction(0))[:1] + _unlinked_upper_rows(N, s)
    rows.append({6: (N - 1) * (N - 2) / N**2, 7: (N - 1) / (2 * N**2),
                 8: (N - 1) / (2 * N**2), 9: (N - 1) / (2 * N**2),
                 10: (N - 1) / (2 * N**2), 11: 1 / (4 * N**2),
                 Q0: (4 * N - 1) / (4 * N**2)})
    rows.append({6: t * (N - 2) / N, 7: s * (N - 1) / (2 * N), 8: t / (2 * N),
                 9: t / (2 * N), 10: t / (2 * N), 11: s / (4 * N),
                 Q0: (2 * N * s - s + 2) / (4 * N)})
    rows.append({6: t * (N - 2) / N, 7: t / (2 * N), 8: s * (N - 1) / (2 * N),
                 9: t / (2 * N), 10: t / (2 * N), 11: s / (4 * N),
                 Q0: (2 * N * s - s + 2) / (4 * N)})
    rows.append({6: (N - 2) * t / N, 7: t / (2 * N), 8: t / (2 * N),
                 9: s * (N - 1) / (2 * N), 10: s * (N - 1) / (2 * N), 11: s / (4 * N),
                 Q0: (4 - s) / (4 * N)})
    rows.append({10: 1 - 1 / N, 11: 1 / (2 * N), Q0: 1 / (2 * N)})
    rows.append({10: t, 11: s / 2, Q0: s / 2})
    return rows


def free_recombination_rows(N: int, s: Fraction) -> list[dict[int, Fraction]]:
    """Rows printed for r = 1/2."""
    N = Fraction(N)
    t = 1 - s
    rows = general_rows(N, s, Fraction(1, 2))[:1] + _unlinked_upper_rows(N, s)
    rows.append({3: (N - 1) * (N - 2) / (2 * N**2), 5: (N - 1) / (4 * N**2),
                 6: (N - 2) * (N - 1) / (2 * N**2), 7: (N - 1) / (2 * N**2),
                 8: (N - 1) / (2 * N**2), 9: (N - 1) / (2 * N**2),
                 10: (N - 1) / (4 * N**2), 11: 1 / (4 * N**2),
                 Q0: (4 * N - 1) / (4 * N**2)})
    rows.append({3: t * (N - 2) / (2 * N), 5: t / (4 * N), 6: t * (N - 2) / (2 * N),
                 7: s * (N - 1) / (2 * N), 8: t / (2 * N), 9: t / (2 * N),
                 10: t / (4 * N), 11: s / (4 * N), Q0: (2 * N * s - s + 2) / (4 * N)})
    rows.append({3: t * (N - 2) / (2 * N), 5: t / (4 * N), 6: t * (N - 2) / (2 * N),
                 7: t / (2 * N), 8: s * (N - 1) / (2 * N), 9: t / (2 * N),
                 10: t / (4 * N), 11: s / (4 * N), Q0: (2 * N * s - s + 2) / (4 * N)})
    rows.append({3: (N - 2) * t / (2 * N), 5: s * (N - 1) / (4 * N),
                 6: t * (N - 2) / (2 * N), 7: t / (2 * N), 8: t / (2 * N),
                 9: s * (N - 1) / (2 * N), 10: s * (N - 1) / (4 * N), 11: s / (4 * N),
                 Q0: (4 - s) / (4 * N)})
    rows.append({5: (N - 1) / (4 * N), 9: (N - 1) / (2 * N), 10: (N - 1) / (4 * N),
                 11: 1 / (4 * N), Q0: 3 / (4 * N)})
    rows.append({5: t / 4, 9: t / 2, 10: t / 4, 11: s / 4, Q0: 3 * s / 4})
    return rows


def total_selfing_limit_rows(r: Fraction) -> list[dict[int, Fraction]]:
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    u = 1 - r
    return [
        {0: Fraction(1)},
        {1: h, Q0: h},
        {2: h, Q0: h},
        {3: h, 6: h},
        {4: q, Q0: 3 * q},
        {5: q, 9: h, 10: q},
        {3: r, 6: u},
        {7: h, Q0: h},
        {8: h, Q0: h},
        {5: r / 2, 9: h, 10: u / 2},
        {5: r**2, 9: 2 * r * u, 10: u**2},
        {11: (u**2 + r**2) / 2, Q0: (1 + 2 * r - 2 * r**2) / 2},
    ]


def _unlinked_limit_upper(s: Fraction) -> list[dict[int, Fraction]]:
    t = 1 - s
    return [
        {0: Fraction(1)},
        {0: t, 1: s / 2, Q0: s / 2},
        {0: t, 2: s / 2, Q0: s / 2},
        {0: t, 3: s / 2, 6: s / 2},
        {0: t**2, 1: s * t / 2, 2: s * t / 2, 4: s**2 / 4, Q0: (4 * s - s**2) / 4},
        {0: t**2, 3: s * t, 5: s**2 / 4, 6: s * t, 9: s**2 / 2, 10: s**2 / 4},
    ]


def no_recombination_limit_rows(s: Fraction) -> list[dict[int, Fraction]]:
    t = 1 - s
    return _unlinked_limit_upper(s) + [
        {6: Fraction(1)},
        {6: t, 7: s / 2, Q0: s / 2},
        {6: t, 8: s / 2, Q0: s / 2},
        {6: t, 9: s / 2, 10: s / 2},
        {10: Fraction(1)},
        {10: t, 11: s / 2, Q0: s / 2},
    ]


def free_recombination_limit_rows(s: Fraction) -> list[dict[int, Fraction]]:
    t = 1 - s
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    return _unlinked_limit_upper(s) + [
        {3: h, 6: h},
        {3: t / 2, 6: t / 2, 7: s / 2, Q0: s / 2},
        {3: t / 2, 6: t / 2, 8: s / 2, Q0: s / 2},
        {3: t / 2, 5: s / 4, 6: t / 2, 9: s / 2, 10: s / 4},
        {5: q, 9: h, 10: q},
        {5: t / 4, 9: t / 2, 10: t / 4, 11: s / 4, Q0: 3 * s / 4},
    ]
