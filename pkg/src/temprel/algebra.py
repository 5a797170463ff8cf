"""Algebra of point and interval temporal relations.

Events are closed time intervals [t_start, t_end] with t_start <= t_end
(degenerate point events allowed).  A relation between two intervals is
decomposed into four point comparisons (start-start, start-end, end-start,
end-end); the start-start comparison is what annotation tasks collect.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

__all__ = [
    "PointRelation",
    "IntervalRelation",
    "PointQuad",
    "Answer",
    "AnswerPair",
    "UnsatisfiableQuadError",
    "InconsistentConstraintsError",
    "decompose_interval_relation",
    "to_start_point_relation",
    "compose_point_relations",
    "complete_quad",
    "answers_to_relation",
    "relation_to_answers",
    "invert_point_relation",
    "saturate_graph",
]


class PointRelation(enum.Enum):
    """Relation between two time points: before, after, equal, or vague."""

    BEFORE = "before"
    AFTER = "after"
    EQUAL = "equal"
    VAGUE = "vague"

    @property
    def base_set(self) -> frozenset[str]:
        """The set of base orders {<, =, >} this label stands for."""
        return _BASE_SETS[self]

    def __repr__(self) -> str:  # pragma: no cover - debugging nicety
        return f"PointRelation.{self.name}"


_LT, _EQ, _GT = "<", "=", ">"
_FULL = frozenset((_LT, _EQ, _GT))

_BASE_SETS: dict[PointRelation, frozenset[str]] = {
    PointRelation.BEFORE: frozenset((_LT,)),
    PointRelation.AFTER: frozenset((_GT,)),
    PointRelation.EQUAL: frozenset((_EQ,)),
    PointRelation.VAGUE: _FULL,
}


def _from_base_set(orders: frozenset[str]) -> PointRelation:
    """Collapse a base-order set to a label; non-singletons become VAGUE."""
    if orders == _BASE_SETS[PointRelation.BEFORE]:
        return PointRelation.BEFORE
    if orders == _BASE_SETS[PointRelation.AFTER]:
        return PointRelation.AFTER
    if orders == _BASE_SETS[PointRelation.EQUAL]:
        return PointRelation.EQUAL
    return PointRelation.VAGUE


_INVERT_BASE = {_LT: _GT, _EQ: _EQ, _GT: _LT}


def _invert_set(orders: frozenset[str]) -> frozenset[str]:
    return frozenset(_INVERT_BASE[o] for o in orders)


def invert_point_relation(rel: PointRelation) -> PointRelation:
    """Relation of (y, x) given the relation of (x, y)."""
    return _from_base_set(_invert_set(rel.base_set))


# Composition of single base orders.  x r1 y and y r2 z constrain (x, z)
# to the listed set; opposite strict orders leave (x, z) unconstrained.
_COMPOSE_BASE: dict[tuple[str, str], frozenset[str]] = {
    (_LT, _LT): frozenset((_LT,)),
    (_LT, _EQ): frozenset((_LT,)),
    (_LT, _GT): _FULL,
    (_EQ, _LT): frozenset((_LT,)),
    (_EQ, _EQ): frozenset((_EQ,)),
    (_EQ, _GT): frozenset((_GT,)),
    (_GT, _LT): _FULL,
    (_GT, _EQ): frozenset((_GT,)),
    (_GT, _GT): frozenset((_GT,)),
}


def _compose_sets(a: frozenset[str], b: frozenset[str]) -> frozenset[str]:
    out: set[str] = set()
    for o1 in a:
        for o2 in b:
            out |= _COMPOSE_BASE[(o1, o2)]
            if len(out) == 3:
                return _FULL
    return frozenset(out)


def compose_point_relations(r1: PointRelation, r2: PointRelation) -> PointRelation:
    """Compose x-vs-y and y-vs-z into the entailed x-vs-z label.

    Any composite base-order set that is not exactly {<}, {>} or {=}
    collapses to VAGUE.
    """
    return _from_base_set(_compose_sets(r1.base_set, r2.base_set))


class IntervalRelation(enum.Enum):
    """The thirteen exhaustive relations between two intervals, plus vague."""

    BEFORE = "before"
    IMMEDIATELY_BEFORE = "immediately_before"
    BEFORE_AND_OVERLAP = "before_and_overlap"
    ENDED_BY = "ended_by"
    INCLUDES = "includes"
    STARTS = "starts"
    EQUAL = "equal"
    STARTED_BY = "started_by"
    INCLUDED = "included"
    ENDS = "ends"
    AFTER_AND_OVERLAP = "after_and_overlap"
    IMMEDIATELY_AFTER = "immediately_after"
    AFTER = "after"
    VAGUE = "vague"

    def __repr__(self) -> str:  # pragma: no cover
        return f"IntervalRelation.{self.name}"


ALLEN_RELATIONS: tuple[IntervalRelation, ...] = tuple(
    r for r in IntervalRelation if r is not IntervalRelation.VAGUE
)


@dataclass(frozen=True)
class PointQuad:
    """The four point comparisons of an interval pair.

    ss: t_start^1 vs t_start^2    se: t_start^1 vs t_end^2
    es: t_end^1 vs t_start^2      ee: t_end^1 vs t_end^2
    """

    ss: PointRelation
    se: PointRelation
    es: PointRelation
    ee: PointRelation

    def as_tuple(self) -> tuple[PointRelation, PointRelation, PointRelation, PointRelation]:
        return (self.ss, self.se, self.es, self.ee)


_B, _A, _E, _V = (
    PointRelation.BEFORE,
    PointRelation.AFTER,
    PointRelation.EQUAL,
    PointRelation.VAGUE,
)

# Point decomposition of each interval relation, read off the geometry of
# two non-degenerate intervals (start strictly below end).
_QUADS: dict[IntervalRelation, PointQuad] = {
    IntervalRelation.BEFORE: PointQuad(_B, _B, _B, _B),
    IntervalRelation.IMMEDIATELY_BEFORE: PointQuad(_B, _B, _E, _B),
    IntervalRelation.BEFORE_AND_OVERLAP: PointQuad(_B, _B, _A, _B),
    IntervalRelation.ENDED_BY: PointQuad(_B, _B, _A, _E),
    IntervalRelation.INCLUDES: PointQuad(_B, _B, _A, _A),
    IntervalRelation.STARTS: PointQuad(_E, _B, _A, _B),
    IntervalRelation.EQUAL: PointQuad(_E, _B, _A, _E),
    IntervalRelation.STARTED_BY: PointQuad(_E, _B, _A, _A),
    IntervalRelation.INCLUDED: PointQuad(_A, _B, _A, _B),
    IntervalRelation.ENDS: PointQuad(_A, _B, _A, _E),
    IntervalRelation.AFTER_AND_OVERLAP: PointQuad(_A, _B, _A, _A),
    IntervalRelation.IMMEDIATELY_AFTER: PointQuad(_A, _E, _A, _A),
    IntervalRelation.AFTER: PointQuad(_A, _A, _A, _A),
}


def decompose_interval_relation(rel: IntervalRelation) -> PointQuad:
    """The unique quad of point relations forced by an interval relation.

    Raises ValueError for VAGUE, which has no unique decomposition.
    """
    if rel is IntervalRelation.VAGUE:
        raise ValueError("vague interval relation has no unique decomposition")
    return _QUADS[rel]


def to_start_point_relation(rel: IntervalRelation) -> PointRelation:
    """Project an interval relation onto the start-start comparison."""
    if rel is IntervalRelation.VAGUE:
        return PointRelation.VAGUE
    return _QUADS[rel].ss


class Answer(enum.Enum):
    YES = "yes"
    NO = "no"


@dataclass(frozen=True)
class AnswerPair:
    """Answers to the two possibility questions about a pair of start points.

    a1 answers "is it possible that t_start^1 is before t_start^2?";
    a2 answers the mirrored question.
    """

    a1: Answer
    a2: Answer


_ANSWER_MAP: dict[tuple[Answer, Answer], PointRelation] = {
    (Answer.YES, Answer.YES): PointRelation.VAGUE,
    (Answer.NO, Answer.NO): PointRelation.EQUAL,
    (Answer.YES, Answer.NO): PointRelation.BEFORE,
    (Answer.NO, Answer.YES): PointRelation.AFTER,
}

_RELATION_MAP = {rel: AnswerPair(a1, a2) for (a1, a2), rel in _ANSWER_MAP.items()}


def answers_to_relation(pair: AnswerPair) -> PointRelation:
    """Map a yes/no answer pair to its start-point relation label."""
    return _ANSWER_MAP[(pair.a1, pair.a2)]


def relation_to_answers(rel: PointRelation) -> AnswerPair:
    """Exact inverse of answers_to_relation."""
    return _RELATION_MAP[rel]


class UnsatisfiableQuadError(ValueError):
    """The known quad coordinates admit no real endpoint assignment."""


class InconsistentConstraintsError(ValueError):
    """A constraint graph derives contradictory orders for some pair."""

    def __init__(self, witness: list[str]):
        self.witness = witness
        super().__init__("inconsistent temporal constraints via " + " -> ".join(witness))


def _propagate(rel: list[list[frozenset[str]]]) -> tuple[int, int, int] | None:
    """Path-consistency fixpoint over a point network; edits rel in place.

    Returns (i, k, j) for the first edge emptied through intermediate k,
    or None when the network closes consistently.  All edge sets here are
    order-convex, for which path consistency is complete.
    """
    n = len(rel)
    changed = True
    while changed:
        changed = False
        for k in range(n):
            for i in range(n):
                if i == k:
                    continue
                rik = rel[i][k]
                for j in range(n):
                    if j == i or j == k:
                        continue
                    composed = _compose_sets(rik, rel[k][j])
                    narrowed = rel[i][j] & composed
                    if narrowed != rel[i][j]:
                        if not narrowed:
                            return (i, k, j)
                        rel[i][j] = narrowed
                        rel[j][i] = _invert_set(narrowed)
                        changed = True
    return None


def complete_quad(partial: PointQuad) -> PointQuad:
    """Fill in unknown quad coordinates by entailment.

    VAGUE coordinates mark unknowns.  Each unknown is replaced by the
    strongest label entailed by the known coordinates together with
    t_start <= t_end for both intervals; anything weaker than a singleton
    stays VAGUE.  Raises UnsatisfiableQuadError when the known coordinates
    conflict.
    """
    # point indices: 0 = start1, 1 = end1, 2 = start2, 3 = end2
    rel = [[_FULL] * 4 for _ in range(4)]
    for i in range(4):
        rel[i][i] = frozenset((_EQ,))
    within = frozenset((_LT, _EQ))  # closed intervals may be degenerate
    edges = {(0, 1): within, (2, 3): within}
    for (i, j), coord in zip(((0, 2), (0, 3), (1, 2), (1, 3)), partial.as_tuple()):
        edges[(i, j)] = coord.base_set
    for (i, j), orders in edges.items():
        narrowed = rel[i][j] & orders
        if not narrowed:
            raise UnsatisfiableQuadError("conflicting coordinates on one edge")
        rel[i][j] = narrowed
        rel[j][i] = _invert_set(narrowed)
    if _propagate(rel) is not None:
        raise UnsatisfiableQuadError("known coordinates admit no assignment")
    return PointQuad(
        ss=_from_base_set(rel[0][2]),
        se=_from_base_set(rel[0][3]),
        es=_from_base_set(rel[1][2]),
        ee=_from_base_set(rel[1][3]),
    )


def saturate_graph(
    events: Iterable[str],
    constraints: Iterable[tuple[str, str, PointRelation]],
) -> Mapping[tuple[str, str], PointRelation]:
    """Transitive closure of start-point constraints between events.

    Returns the entailed label for every ordered pair of distinct events.
    Raises InconsistentConstraintsError (with a witness chain of event
    ids) when the constraints admit no assignment.
    """
    ids = list(events)
    index = {eid: i for i, eid in enumerate(ids)}
    if len(index) != len(ids):
        raise ValueError("duplicate event id")
    n = len(ids)
    rel = [[_FULL] * n for _ in range(n)]
    for i in range(n):
        rel[i][i] = frozenset((_EQ,))
    for first, second, label in constraints:
        if first not in index:
            raise ValueError(f"constraint references unknown event {first!r}")
        if second not in index:
            raise ValueError(f"constraint references unknown event {second!r}")
        i, j = index[first], index[second]
        if i == j:
            if label not in (PointRelation.EQUAL, PointRelation.VAGUE):
                raise InconsistentConstraintsError([first, second])
            continue
        narrowed = rel[i][j] & label.base_set
        if not narrowed:
            raise InconsistentConstraintsError([first, second])
        rel[i][j] = narrowed
        rel[j][i] = _invert_set(narrowed)
    culprit = _propagate(rel)
    if culprit is not None:
        i, k, j = culprit
        raise InconsistentConstraintsError([ids[i], ids[k], ids[j]])
    closure: dict[tuple[str, str], PointRelation] = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                closure[(ids[i], ids[j])] = _from_base_set(rel[i][j])
    return closure
