"""Veins, slices, structural colouring and panel decompositions.

A window of k consecutive columns whose alpha letters lie in {0, 2} is
carved into fat veins (thickened left-to-right chains) and the slices
between them.  Colouring the window blue/yellow/green/pink/red makes
the adjacency between a window and everything to its right depend only
on the region a vertex sits in, never on its row; that is what lets the
panel construction recycle labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .deltaspec import DeltaSpec, KFactor, alpha_plus, find_next_occurrence
from .errors import HorizonError, InputError, InvariantError
from .grid import GridGraph, GridVertex, adjacent, build_rectangle
from .params import mu


@dataclass(frozen=True)
class Vein:
    """Vertices in consecutive columns, each adjacent to the next."""

    start: int
    vertices: tuple[GridVertex, ...]

    @property
    def rows(self) -> tuple[int, ...]:
        return tuple(v.row for v in self.vertices)

    def __len__(self):
        return len(self.vertices)


def upper_border(rows: Iterable[int], alpha_letters: Iterable[int]) -> tuple[int, ...]:
    """Top boundary of the fat vein over a full vein's row heights.

    Walks left to right: the first column's bound is the vein row; after
    a 2-link the bound drops to the previous vein row, after a 0-link it
    carries over unchanged.
    """
    u = list(rows)
    letters = list(alpha_letters)
    if len(letters) != len(u) - 1:
        raise InputError("need one alpha letter per consecutive column pair")
    bad = [a for a in letters if a not in (0, 2)]
    if bad:
        raise InputError(f"upper border needs alpha letters in {{0,2}}, got {bad}; collapse the word first")
    if not u:
        return ()
    w = [u[0]]
    for x in range(1, len(u)):
        w.append(u[x - 1] if letters[x - 1] == 2 else w[x - 1])
    return tuple(w)


@dataclass(frozen=True)
class FatVein:
    vein: Vein
    lower: tuple[int, ...]  # vein rows per column
    upper: tuple[int, ...]  # upper-border rows per column
    members: frozenset[GridVertex]


@dataclass(frozen=True)
class SliceDecomposition:
    """Maximal independent full veins of a window, with their slices."""

    window: GridGraph
    start: int
    width: int
    fat_veins: tuple[FatVein, ...]
    slices: tuple[frozenset[GridVertex], ...]  # S_0 .. S_b bottom-up

    @property
    def b(self) -> int:
        return len(self.fat_veins)

    @property
    def veins(self) -> tuple[Vein, ...]:
        return tuple(f.vein for f in self.fat_veins)

    def region(self, v: GridVertex):
        """("fat", i) with i in 1..b or ("slice", i) with i in 0..b."""
        for i, f in enumerate(self.fat_veins, start=1):
            if v in f.members:
                return ("fat", i)
        for i, s in enumerate(self.slices):
            if v in s:
                return ("slice", i)
        raise InputError(f"{v} is not in the window")

    def region_ord(self, v: GridVertex) -> int:
        kind, i = self.region(v)
        return 2 * i if kind == "slice" else 2 * i - 1


def _window_alpha(window: GridGraph, start: int, width: int) -> list[int]:
    letters = [window.spec.alpha.letter(x) for x in range(start, start + width - 1)]
    bad = [a for a in letters if a not in (0, 2)]
    if bad:
        raise InputError(
            f"window alpha letters must lie in {{0,2}}, got {bad}; apply the 1->0, 3->2 collapse first"
        )
    return letters


def _lowest_full_vein(window: GridGraph, start: int, width: int, available: set):
    """Column-wise minimal full vein on available vertices, or None.

    Full veins through available vertices are closed under column-wise
    minimum, so forward/backward reachability leaves, per column,
    exactly the vertices lying on some full vein; their minima form the
    unique lowest one.
    """
    cols = list(range(start, start + width))
    per_col = [sorted((v for v in available if v.col == c), key=lambda v: v.row) for c in cols]
    if any(not col for col in per_col):
        return None
    reach = [set(per_col[0])]
    for x in range(1, width):
        cur = {v for v in per_col[x] if any(window.has_edge(u, v) for u in reach[x - 1])}
        if not cur:
            return None
        reach.append(cur)
    back = [set() for _ in cols]
    back[-1] = reach[-1]
    for x in range(width - 2, -1, -1):
        back[x] = {u for u in reach[x] if any(window.has_edge(u, v) for v in back[x + 1])}
        if not back[x]:
            return None
    verts = tuple(min(back[x], key=lambda v: v.row) for x in range(width))
    for a, b in zip(verts, verts[1:]):
        if not window.has_edge(a, b):
            raise InvariantError(f"column-wise minima {a}-{b} failed to stay adjacent")
    return Vein(start=start, vertices=verts)


def maximal_independent_full_veins(window: GridGraph, start: int, width: int) -> SliceDecomposition:
    """Greedy bottom-up selection of independent full veins plus slices.

    Each selected vein is thickened to its fat vein, whose vertices are
    removed from further consideration; successive veins therefore sit
    strictly above the previous fat vein in every column, which keeps
    fat veins pairwise disjoint.
    """
    letters = _window_alpha(window, start, width)
    available = set(window.vertices)
    fats: list[FatVein] = []
    while True:
        vein = _lowest_full_vein(window, start, width, available)
        if vein is None:
            break
        lower = vein.rows
        upper = upper_border(lower, letters)
        members = frozenset(
            v for v in window.vertices
            if lower[v.col - start] <= v.row <= upper[v.col - start]
        )
        if any(v not in available for v in members):
            raise InvariantError("fat vein touched a previously selected fat vein")
        fats.append(FatVein(vein=vein, lower=lower, upper=upper, members=members))
        available -= members

    b = len(fats)
    slices: list[set] = [set() for _ in range(b + 1)]
    for v in window.vertices:
        x = v.col - start
        level = 0
        for i, f in enumerate(fats, start=1):
            if v.row > f.upper[x]:
                level = i
            elif v.row >= f.lower[x]:
                level = None  # fat member
                break
            else:
                break
        if level is not None:
            slices[level].add(v)
    return SliceDecomposition(
        window=window,
        start=start,
        width=width,
        fat_veins=tuple(fats),
        slices=tuple(frozenset(s) for s in slices),
    )


def enumerate_full_veins(window: GridGraph, start: int, width: int):
    """Every full vein of the window (exhaustive; test-scale only)."""
    cols = list(range(start, start + width))
    per_col = [sorted((v for v in window.vertices if v.col == c), key=lambda v: v.row) for c in cols]
    if any(not col for col in per_col):
        return
    stack: list[GridVertex] = []

    def rec(x):
        if x == width:
            yield Vein(start=start, vertices=tuple(stack))
            return
        for v in per_col[x]:
            if x == 0 or window.has_edge(stack[-1], v):
                stack.append(v)
                yield from rec(x + 1)
                stack.pop()

    yield from rec(0)


@dataclass(frozen=True)
class SliceBounds:
    t: int  # column of the rightmost green vertex
    s: int  # highest column index below t whose alpha letter is 2
    has_greens: bool
    # s found at an actual 2-link; a fallback s=j must not paint the fat
    # vein below blue, or the blue/yellow adjacency laws break on 0-links
    genuine: bool = False


@dataclass(frozen=True)
class StructuralColouring:
    decomposition: SliceDecomposition
    colour: dict  # vertex -> blue | yellow | green | pink | red
    slice_bounds: tuple[SliceBounds, ...]

    def of_colour(self, c: str) -> frozenset:
        return frozenset(v for v, col in self.colour.items() if col == c)


def structural_colouring(d: SliceDecomposition) -> StructuralColouring:
    """Colour slices green/pink/red and fat veins blue/yellow.

    Green spreads from the window's left column along part veins that
    avoid fat-vein vertices; pink fills strictly below greens in the
    columns up to each slice's 2-link boundary; fat veins are blue up to
    that boundary and yellow beyond it, or all yellow under a slice with
    no greens at all.
    """
    window, j, k = d.window, d.start, d.width
    letters = _window_alpha(window, j, k)
    fat_members = set().union(*[f.members for f in d.fat_veins]) if d.fat_veins else set()
    nonfat = [v for v in window.vertices if v not in fat_members]
    per_col = {c: [v for v in nonfat if v.col == c] for c in range(j, j + k)}

    def reachable_from(seeds):
        # Part veins advance one column rightward per step and may pass
        # through any non-fat vertex, whatever slice it lies in.
        reached = set(seeds)
        frontier = set(seeds)
        for c in range(j + 1, j + k):
            nxt = {v for v in per_col.get(c, ()) if any(window.has_edge(u, v) for u in frontier)}
            reached |= nxt
            frontier = nxt
        return reached

    colour: dict = {}
    bounds: list[SliceBounds] = []
    for s_idx, sl in enumerate(d.slices):
        seeds = [v for v in sl if v.col == j]
        greens = sl & reachable_from(seeds) if seeds else set()
        has = bool(greens)
        genuine = False
        if has:
            t = max(v.col for v in greens)
            s_col = j
            if t > j:
                two_cols = [x for x in range(j, t) if letters[x - j] == 2]
                if two_cols:
                    s_col = max(two_cols)
                    genuine = True
        else:
            t = s_col = j
        bounds.append(SliceBounds(t=t, s=s_col, has_greens=has, genuine=genuine))
        green_rows = {}
        for v in greens:
            green_rows.setdefault(v.col, []).append(v.row)
        for v in sl:
            if v in greens:
                colour[v] = "green"
            elif j <= v.col <= s_col and any(r > v.row for r in green_rows.get(v.col, ())):
                colour[v] = "pink"
            else:
                colour[v] = "red"

    for i, f in enumerate(d.fat_veins, start=1):
        above = bounds[i]  # slice S_i sits immediately above fat vein i
        for v in f.members:
            if above.genuine and v.col <= above.s:
                colour[v] = "blue"
            else:
                colour[v] = "yellow"
    return StructuralColouring(decomposition=d, colour=colour, slice_bounds=tuple(bounds))


def merge_green_pink(c: StructuralColouring) -> StructuralColouring:
    merged = {v: ("green" if col == "pink" else col) for v, col in c.colour.items()}
    return StructuralColouring(decomposition=c.decomposition, colour=merged,
                               slice_bounds=c.slice_bounds)


def check_red_yellow_laws(c: StructuralColouring):
    """Verify the region-determined adjacency of red and yellow vertices.

    For a red vertex, edges to blue/green/pink vertices one column left
    exist exactly under a 2-link into a strictly higher region, and one
    column right exactly under a 2-link from a region not above its own.
    Yellow is the same with its own region included on the left.
    Returns (ok, violations).
    """
    d = c.decomposition
    window, j = d.window, d.start
    letters = _window_alpha(window, j, d.width)
    violations = []
    for v in window.vertices:
        cv = c.colour[v]
        if cv not in ("red", "yellow"):
            continue
        ov = d.region_ord(v)
        for u in window.vertices:
            if c.colour[u] not in ("blue", "green", "pink"):
                continue
            if u.col == v.col - 1:
                a = letters[u.col - j]
                if cv == "red":
                    expected = a == 2 and d.region_ord(u) > ov
                else:
                    expected = a == 2 and d.region_ord(u) >= ov
            elif u.col == v.col + 1:
                a = letters[v.col - j]
                if cv == "red":
                    expected = a == 2 and d.region_ord(u) <= ov
                else:
                    expected = a == 2 and d.region_ord(u) < ov
            else:
                continue
            if window.has_edge(u, v) != expected:
                violations.append((u, v, cv, expected))
    return (not violations), violations


def same_column_similarity_invariance(G: GridGraph, Gplus: GridGraph, U) -> bool:
    """Same-column pairs of U are similar in G exactly when similar in G+."""
    if G.vertices != Gplus.vertices:
        raise InputError("the two graphs must share one vertex set")
    subject = sorted({GridVertex(*v) for v in U})
    umask = 0
    for v in subject:
        umask |= 1 << G.index[v]
    ctx = ~umask

    def fp(g, v):
        return g.neighbour_mask(g.index[v]) & ctx

    for a in range(len(subject)):
        for b in range(a + 1, len(subject)):
            u1, u2 = subject[a], subject[b]
            if u1.col != u2.col:
                continue
            if (fp(G, u1) == fp(G, u2)) != (fp(Gplus, u1) == fp(Gplus, u2)):
                return False
    return True


@dataclass(frozen=True)
class PanelWindow:
    index: int  # 1-based
    start: int
    end: int
    decomposition: SliceDecomposition
    colouring: StructuralColouring  # pink already merged into green

    def colour_set(self, colour: str) -> frozenset:
        return self.colouring.of_colour(colour)


@dataclass(frozen=True)
class PanelDecomposition:
    """Vertex blocks between successive copies of a fixed window pattern.

    Panel i holds the yellow and red part of window i-1, the white gap
    before window i, and the green and blue part of window i; a trailing
    panel collects what remains after the last window.
    """

    spec: DeltaSpec
    factor: KFactor
    windows: tuple[PanelWindow, ...]
    panels: tuple[frozenset[GridVertex], ...]
    colour: dict  # vertex -> blue | yellow | green | red | white

    @property
    def count(self) -> int:
        return len(self.panels)

    def prefix_union(self, i: int) -> frozenset:
        out: set = set()
        for p in self.panels[:i]:
            out |= p
        return frozenset(out)

    def report_tsv(self) -> str:
        lines = []
        order = ("blue", "yellow", "green", "red", "white")
        for i, p in enumerate(self.panels, start=1):
            if p:
                cols = sorted(v.col for v in p)
                span = f"{cols[0]}-{cols[-1]}"
            else:
                span = "-"
            sizes = " ".join(f"{c}={sum(1 for v in p if self.colour[v] == c)}" for c in order)
            lines.append(f"panel {i}\t{span}\t{sizes}")
        return "\n".join(lines) + "\n"


def locate_window_ends(spec: DeltaSpec, f: KFactor, lo: int, hi: int) -> list[int]:
    """Right-end columns of disjoint copies of f inside [lo, hi],
    greedily leftmost, each full copy separated from the previous end."""
    k = f.width
    ends: list[int] = []
    prev_end = lo - 1
    while True:
        j = find_next_occurrence(spec, f, after=prev_end + 1, horizon=hi)
        if j is None:
            return ends
        ends.append(j + k - 1)
        prev_end = ends[-1]


def build_panels(spec: DeltaSpec, G: GridGraph, f: KFactor) -> PanelDecomposition:
    """Partition G's vertices into panels at copies of the window pattern.

    Window columns are coloured through the {0,2}-collapsed triple; gap
    vertices are white.  With no located copy the whole graph is one
    white panel; an empty graph has no panels.
    """
    if len(G) == 0:
        return PanelDecomposition(spec=spec, factor=f, windows=(), panels=(), colour={})
    cols = G.columns()
    mincol, maxcol = cols[0], cols[-1]
    plus_spec = alpha_plus(spec)
    Gplus = GridGraph(plus_spec, G.vertices)

    k = f.width
    ends = locate_window_ends(spec, f, lo=mincol, hi=maxcol)
    windows: list[PanelWindow] = []
    for idx, end in enumerate(ends, start=1):
        wstart = end - k + 1
        wgraph = Gplus.restrict([v for v in G.vertices if wstart <= v.col <= end])
        decomp = maximal_independent_full_veins(wgraph, wstart, k)
        colouring = merge_green_pink(structural_colouring(decomp))
        windows.append(PanelWindow(index=idx, start=wstart, end=end,
                                   decomposition=decomp, colouring=colouring))

    colour: dict = {}
    for w in windows:
        colour.update(w.colouring.colour)
    for v in G.vertices:
        colour.setdefault(v, "white")

    def between(lo, hi):
        return frozenset(v for v in G.vertices if lo <= v.col <= hi)

    panels: list[frozenset] = []
    if not windows:
        panels.append(frozenset(G.vertices))
    else:
        first = windows[0]
        panels.append(between(mincol, first.start - 1)
                      | first.colour_set("green") | first.colour_set("blue"))
        for prev, cur in zip(windows, windows[1:]):
            panels.append(prev.colour_set("yellow") | prev.colour_set("red")
                          | between(prev.end + 1, cur.start - 1)
                          | cur.colour_set("green") | cur.colour_set("blue"))
        last = windows[-1]
        trailing = (last.colour_set("yellow") | last.colour_set("red")
                    | between(last.end + 1, maxcol))
        if trailing:
            panels.append(trailing)

    covered = set().union(*panels) if panels else set()
    if covered != set(G.vertices) or sum(len(p) for p in panels) != len(G):
        raise InvariantError("panels failed to partition the vertex set")
    return PanelDecomposition(spec=spec, factor=f, windows=tuple(windows),
                              panels=tuple(panels), colour=colour)


def panel_similarity_bound(d: PanelDecomposition, G: GridGraph, M: int, k: int):
    """Check the class count of every panel prefix stays below M + 2k^2."""
    bound = M + 2 * k * k
    values = []
    ok = True
    for i in range(1, d.count + 1):
        pref = d.prefix_union(i)
        value = mu(G, pref) if pref else 0
        values.append(value)
        if value >= bound:
            ok = False
    return ok, values


def independent_veins_embed_square(d: SliceDecomposition, spec: DeltaSpec, k: int):
    """Explicit square embedding from k independent full veins.

    Maps the vein-y vertex in column x to grid position (x, y) and
    validates every pair against the oracle; a mismatch means the veins
    were not independent and is reported as an invariant failure.
    Returns None when fewer than k veins are available.
    """
    if d.b < k:
        return None
    j = d.start
    if d.width < k:
        raise InputError(f"window width {d.width} cannot host a {k}-column square")
    chosen = d.veins[:k]
    phi = {}
    for y, vein in enumerate(chosen, start=1):
        for v in vein.vertices[:k]:
            phi[GridVertex(v.col, y)] = v
    target = build_rectangle(spec, j, 1, k, k)
    for a_idx, (tv, wv) in enumerate(phi.items()):
        for tv2, wv2 in list(phi.items())[a_idx + 1:]:
            want = target.has_edge(tv, tv2)
            got = d.window.has_edge(wv, wv2)
            if want != got:
                raise InvariantError(
                    f"vein embedding mismatch: {wv}-{wv2} vs square {tv}-{tv2}"
                )
    return phi
