"""Neighbourhood-equivalence counts and the boundedness parameters.

mu(G, U) counts classes of U under "same neighbourhood outside U".  The
two-row count n_delta drives unboundedness of clique-width; the one-row
bond count m_beta drives minimality.  Both are computed by definition,
with an independent incremental second implementation of m_beta kept for
cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .deltaspec import BondSource, DeltaSpec, KFactor, extract_k_factor, factors_equal
from .errors import HorizonError, InputError
from .grid import GridGraph, GridVertex, build_bond_graph, build_two_row


@dataclass(frozen=True)
class SimilarityPartition:
    """Classes of a subject set under equal neighbourhoods in the rest."""

    subject: tuple[GridVertex, ...]
    context: tuple[GridVertex, ...]
    classes: tuple[tuple[GridVertex, ...], ...]

    @property
    def count(self) -> int:
        return len(self.classes)

    def class_of(self, v: GridVertex) -> int:
        for i, cls in enumerate(self.classes):
            if v in cls:
                return i
        raise InputError(f"{v} not in subject set")


def similarity_partition(G: GridGraph, U: Iterable[GridVertex]) -> SimilarityPartition:
    subject = tuple(sorted(GridVertex(*v) for v in set(map(tuple, U))))
    missing = [v for v in subject if v not in G.index]
    if missing:
        raise InputError(f"subject vertices not in graph: {missing[:3]}")
    umask = 0
    for v in subject:
        umask |= 1 << G.index[v]
    ctx_mask = ~umask
    groups: dict[int, list[GridVertex]] = {}
    for v in subject:
        fp = G.neighbour_mask(G.index[v]) & ctx_mask
        groups.setdefault(fp, []).append(v)
    classes = sorted((tuple(sorted(g)) for g in groups.values()), key=lambda c: c[0])
    context = tuple(v for v in G.vertices if v not in set(subject))
    return SimilarityPartition(subject=subject, context=context, classes=tuple(classes))


def mu(G: GridGraph, U: Iterable[GridVertex]) -> int:
    return similarity_partition(G, U).count


def n_delta(spec: DeltaSpec, Q: Iterable[int]) -> int:
    """Class count of row 1 against row 2 over the columns Q."""
    two = build_two_row(spec, Q)
    return mu(two.graph, two.row1)


def n_delta_partition(spec: DeltaSpec, Q: Iterable[int]) -> SimilarityPartition:
    two = build_two_row(spec, Q)
    return similarity_partition(two.graph, two.row1)


def _bond_class_count(beta: BondSource, n: int, m: int) -> int:
    graph = build_bond_graph(beta, range(1, n + 1))
    ctx = range(m + 1, n + 1)
    fingerprints = {graph.neighbours_in(x, ctx) for x in range(1, m + 1)}
    return len(fingerprints)


def m_beta(beta: BondSource, n: int) -> int:
    """Worst class count of a prefix [1,m] against its suffix in [1,n]."""
    if n < 2:
        raise InputError(f"m_beta needs n >= 2, got {n}")
    return max(_bond_class_count(beta, n, m) for m in range(1, n))


def m_beta_incremental(beta: BondSource, n: int) -> int:
    """Second, independent m_beta: peel context columns off one at a time.

    Walking m downward, the partition of [1, m] refines the restriction
    of the partition of [1, m+1] by adjacency to the newly exposed
    column m+1; only the running maximum is kept.
    """
    if n < 2:
        raise InputError(f"m_beta needs n >= 2, got {n}")
    graph = build_bond_graph(beta, range(1, n + 1))
    classes = [tuple(range(1, n))]  # m = n-1 before refining by column n
    best = 0
    for m in range(n - 1, 0, -1):
        exposed = m + 1
        refined = []
        for cls in classes:
            with_edge = tuple(x for x in cls if x <= m and graph.has_edge(x, exposed))
            without = tuple(x for x in cls if x <= m and not graph.has_edge(x, exposed))
            refined.extend(g for g in (with_edge, without) if g)
        classes = refined
        best = max(best, len(classes))
    return best


@dataclass(frozen=True)
class ParamCurve:
    kind: str  # "n-delta" | "m-beta" | "n-delta-star"
    points: tuple[tuple[int, int], ...]

    def as_tsv(self) -> str:
        return "".join(f"{n}\t{v}\n" for n, v in self.points)

    def sparkline(self) -> str:
        if not self.points:
            return ""
        blocks = "▁▂▃▄▅▆▇█"
        top = max(v for _, v in self.points)
        return "".join(blocks[min(len(blocks) - 1, (v * len(blocks) - 1) // max(top, 1))]
                       for _, v in self.points)


def n_delta_curve(spec: DeltaSpec, max_n: int) -> ParamCurve:
    pts = tuple((n, n_delta(spec, range(1, n + 1))) for n in range(2, max_n + 1))
    return ParamCurve(kind="n-delta", points=pts)


def m_beta_curve(beta: BondSource, max_n: int) -> ParamCurve:
    pts = tuple((n, m_beta(beta, n)) for n in range(2, max_n + 1))
    return ParamCurve(kind="m-beta", points=pts)


def locate_disjoint_occurrences(spec: DeltaSpec, f: KFactor, count: int, horizon: int,
                                first_after: int = 0) -> list[int]:
    """Right-end columns of `count` disjoint copies of f, leftmost-greedy.

    Successive right ends t obey t_next > t + width so that copies never
    share a column.  Raises HorizonError when the horizon runs out.
    """
    from .deltaspec import find_next_occurrence

    k = f.width
    ends = []
    prev_end = first_after
    while len(ends) < count:
        j = find_next_occurrence(spec, f, after=prev_end + 1, horizon=horizon)
        if j is None:
            raise HorizonError(
                f"found only {len(ends)} of {count} disjoint copies within horizon {horizon}"
                + (f"; last copy ended at {ends[-1]}" if ends else "")
            )
        ends.append(j + k - 1)
        prev_end = ends[-1]
    return ends


def n_delta_star(spec: DeltaSpec, f: KFactor, count: int, horizon: int = 400) -> ParamCurve:
    """Running suprema of the two-row count over successive gap intervals.

    The i-th gap interval runs from the start of copy i to the end of
    copy i+1, so `count` gaps need count+1 disjoint copies.
    """
    if count < 1:
        raise InputError(f"need count >= 1, got {count}")
    ends = locate_disjoint_occurrences(spec, f, count + 1, horizon)
    k = f.width
    pts = []
    best = 0
    for i in range(count):
        gap = range(ends[i] - k + 1, ends[i + 1] + 1)
        best = max(best, n_delta(spec, gap))
        pts.append((i + 1, best))
    return ParamCurve(kind="n-delta-star", points=tuple(pts))


def check_refinement(beta: BondSource, n: int, m: int, m2: int) -> bool:
    """Prefix classes against the far suffix nest as the cut moves right."""
    if not (m < m2 < n):
        raise InputError(f"need m < m2 < n, got m={m}, m2={m2}, n={n}")
    graph = build_bond_graph(beta, range(1, n + 1))

    def classes(cut):
        groups: dict[tuple, list[int]] = {}
        for x in range(1, cut + 1):
            groups.setdefault(graph.neighbours_in(x, range(cut + 1, n + 1)), []).append(x)
        return [set(g) for g in groups.values()]

    fine = classes(m)
    coarse = classes(m2)
    return all(any(c <= c2 for c2 in coarse) for c in fine)


def check_m_le_n_plus_1(spec: DeltaSpec, n: int) -> bool:
    """The one-row count never beats the two-row count by more than one."""
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    return m_beta(spec.beta, n) <= n_delta(spec, range(1, n + 1)) + 1
