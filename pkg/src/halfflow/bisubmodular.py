"""Capacity bounds on signed six-element blocks and their polyhedra.

A block models a degree-3 position with node capacity ``b``: flow routed
through the three branches must conserve (what enters leaves elsewhere) and
the total through the node is at most ``b``.  On the *signed doubling* of the
three branches -- ground set ``(1+, 2+, 3+, 1-, 2-, 3-)``, bits 0..5 -- this
is captured by a submodular bound whose value on a subset depends only on the
subset's type.  The base polyhedron of that bound projects onto the simplex
of feasible branch throughputs, which is what lets an ordinary submodular
flow drive the whole block exactly.

Half-integral quantities are stored doubled throughout, so every value in
this module is an ``int``.
"""

from __future__ import annotations

from .errors import DisjointnessError, NotInBase

GROUND = 6
FULL_MASK = (1 << GROUND) - 1
PLUS_MASK = 0b000111
MINUS_MASK = 0b111000

ELEMENT_NAMES = ("1+", "2+", "3+", "1-", "2-", "3-")


def classify_type(mask: int) -> int:
    """Classify a subset of the signed ground set into one of six types.

    The types partition the 64 subsets; the bound below is constant on each.
    """
    plus = mask & PLUS_MASK
    minus = (mask >> 3) & PLUS_MASK
    np_, nm = bin(plus).count("1"), bin(minus).count("1")
    if np_ == 0 or nm == 3:
        return 3
    if np_ == 1:
        if nm == 2 and minus == PLUS_MASK ^ plus:
            return 2
        return 5
    if nm <= 1:
        return 1
    if np_ == 2:
        return 4
    return 6  # np_ == 3, nm == 2


_TYPE_MULT = {1: 2, 2: 0, 3: 0, 4: 1, 5: 1, 6: 1}
TYPE_MULTIPLIER = tuple(_TYPE_MULT[classify_type(m)] for m in range(64))

# masks containing u but not v, for exchange-capacity scans
MASKS_UV = tuple(
    tuple(
        tuple(m for m in range(64) if (m >> u) & 1 and not (m >> v) & 1)
        if u != v else ()
        for v in range(GROUND))
    for u in range(GROUND))

MASK_BITS = tuple(tuple(i for i in range(GROUND) if (m >> i) & 1)
                  for m in range(64))


def signed_bound(b: int, mask: int) -> int:
    """Value of the block bound with capacity ``b`` on a signed subset."""
    return b * TYPE_MULTIPLIER[mask]


def signed_bound_table(b: int) -> list[int]:
    return [b * mult for mult in TYPE_MULTIPLIER]


def triple_bound(b: int, plus: frozenset | set, minus: frozenset | set) -> int:
    """Bound on (flow into ``plus`` branches) - (flow into ``minus`` ones).

    Branches are indexed 0..2 and the two argument sets must be disjoint.
    """
    plus, minus = set(plus), set(minus)
    if plus & minus:
        raise DisjointnessError(f"overlapping branch sets {plus} and {minus}")
    if any(i not in (0, 1, 2) for i in plus | minus):
        raise ValueError("branch indices must be in 0..2")
    if len(plus) >= 2:
        return 2 * b
    if len(plus) == 1 and len(minus) <= 1:
        return b
    return 0


def mask_sum(x: tuple | list, mask: int) -> int:
    return sum(x[i] for i in MASK_BITS[mask])


def in_base(b: int, x: tuple | list) -> bool:
    """Is ``x`` in the base polyhedron of the block bound?"""
    if sum(x) != 0:
        return False
    return all(mask_sum(x, m) <= b * TYPE_MULTIPLIER[m] for m in range(1, 64))


def exchange_capacity(b: int, x: tuple | list, u: int, v: int) -> int:
    """Largest step moving mass from coordinate ``v`` to ``u`` inside the base.

    Equals the minimum slack of the bound over subsets containing ``u`` but
    not ``v``; a constant-time scan of at most 16 subsets.
    """
    if u == v:
        raise ValueError("coordinates must be distinct")
    if not in_base(b, x):
        raise NotInBase(f"{x} is not in the base polyhedron (b={b})")
    return min(b * TYPE_MULTIPLIER[m] - mask_sum(x, m) for m in MASKS_UV[u][v])


def project_boundary(x: tuple | list) -> tuple[int, int, int]:
    """Project a signed boundary vector to doubled branch throughputs.

    Component ``i`` is twice ``(x(i+) - x(i-)) / 2``, i.e. it stays integral.
    """
    return (x[0] - x[3], x[1] - x[4], x[2] - x[5])


def in_degree_polytope(b: int, z2: tuple | list) -> bool:
    """Membership of doubled throughputs in the degree-3 feasibility simplex.

    The simplex has vertices 0 and the three two-branch saturations; its
    facets are nonnegativity, total at most ``2b`` and the three triangle
    inequalities between branches.
    """
    a, c, d = z2
    if a < 0 or c < 0 or d < 0:
        return False
    return (a + c + d <= 4 * b
            and a - c - d <= 0
            and -a + c - d <= 0
            and -a - c + d <= 0)
