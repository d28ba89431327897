"""Linear clique-width expression builders with exact label budgets.

Three constructions, all row-by-row and bottom-up: a rectangular block
with two labels per column; a whole-graph build for triples whose alpha
letters are eventually binary, keyed by a column partition from the
two-row graph; and the panel construction that recycles one bounded
label roster per panel for graphs avoiding a fixed square.

Every cross-class edge decision is checked against the target graph for
class uniformity at runtime; a mixed class is an invariant failure, not
a silent wrong edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cwx import AddVertex, JoinOp, LabelBudget, LinearExpression, RelabelOp
from .deltaspec import DeltaSpec, KFactor, classify, extract_k_factor
from .errors import InputError, InvariantError
from .grid import GridGraph, GridVertex
from .params import m_beta, n_delta_partition
from .veins import PanelDecomposition, build_panels


class _LabelPool:
    """Deterministic symbolic-key to integer label allocation."""

    def __init__(self):
        self._map: dict = {}
        self._kind: dict[int, str] = {}
        self._next = 1

    def get(self, key) -> int:
        if key not in self._map:
            self._map[key] = self._next
            self._kind[self._next] = key[0] if isinstance(key, tuple) else str(key)
            self._next += 1
        return self._map[key]

    def kind(self, label: int) -> str:
        return self._kind.get(label, "?")

    def items_of_kind(self, *kinds):
        return [(key, lab) for key, lab in self._map.items()
                if isinstance(key, tuple) and key[0] in kinds]


class _Builder:
    """Shared op emission plus a mirror of the evaluation state."""

    def __init__(self, target: GridGraph):
        self.target = target
        self.ops: list = []
        self.label_of: dict[GridVertex, int] = {}
        self.members: dict[int, set] = {}

    def add(self, v: GridVertex, label: int):
        self.ops.append(AddVertex(v, label))
        self.label_of[v] = label
        self.members.setdefault(label, set()).add(v)

    def relabel(self, i: int, j: int):
        if i == j:
            return
        moving = self.members.pop(i, set())
        if not moving:
            return
        self.ops.append(RelabelOp(i, j))
        for v in moving:
            self.label_of[v] = j
        self.members.setdefault(j, set()).update(moving)

    def join_exact(self, i: int, j: int):
        self.ops.append(JoinOp(i, j))

    def join_classes(self, cur: int, v: GridVertex, skip=()):
        """Join cur to every live class fully adjacent to v.

        A class mixing adjacent and non-adjacent members means the
        partition underlying the labels is wrong.
        """
        for other in sorted(self.members):
            if other == cur or other in skip:
                continue
            group = self.members[other]
            if not group:
                continue
            adjacency = {self.target.has_edge(v, u) for u in group}
            if len(adjacency) > 1:
                raise InvariantError(
                    f"label {other} mixes adjacent and non-adjacent vertices for {v}"
                )
            if adjacency == {True}:
                self.join_exact(cur, other)

    def finish(self, budget: LabelBudget) -> LinearExpression:
        expr = LinearExpression(ops=tuple(self.ops), budget=budget)
        if expr.label_count() > budget.value:
            raise InvariantError(
                f"used {expr.label_count()} labels, over the budget {budget.value}"
            )
        return expr


def build_rectangular_block(spec: DeltaSpec, i: int, j: int, m: int, n: int) -> LinearExpression:
    """Row-by-row block build with a current and an earlier label per column."""
    target = GridGraph(spec, [GridVertex(c, r) for c in range(i, i + m) for r in range(j, j + n)])
    budget = LabelBudget(formula="2L", params=(("L", m),), value=2 * m)
    b = _Builder(target)
    if m == 0 or n == 0:
        return b.finish(budget)
    cur = {x: x + 1 for x in range(m)}          # c_1..c_L
    earlier = {x: m + x + 1 for x in range(m)}  # e_1..e_L
    for r in range(j, j + n):
        for x in range(m):
            b.add(GridVertex(i + x, r), cur[x])
        for x in range(m):
            v = GridVertex(i + x, r)
            for x2 in range(x):
                if target.has_edge(v, GridVertex(i + x2, r)):
                    b.join_exact(cur[x2], cur[x])
            if r > j:
                # Within a column, every earlier row relates to the new
                # vertex the same way, so one probe row decides.
                for x2 in range(m):
                    if target.has_edge(v, GridVertex(i + x2, r - 1)):
                        b.join_exact(cur[x], earlier[x2])
        if r < j + n - 1:
            for x in range(m):
                b.relabel(cur[x], earlier[x])
    return b.finish(budget)


def _lower_adjacency(spec: DeltaSpec, upper_col: int, lower_col: int) -> bool:
    """Whether a vertex is adjacent to every strictly lower row of the
    other column; well-defined for any alpha letter."""
    if upper_col == lower_col:
        return spec.gamma.letter(upper_col) == 1
    if abs(upper_col - lower_col) > 1:
        return spec.beta.contains(upper_col, lower_col)
    left = min(upper_col, lower_col)
    a = spec.alpha.letter(left)
    if a == 0:
        return False
    if a == 1:
        return True
    # chain letters favour one side for everything strictly below
    if a == 2:
        return upper_col < lower_col
    return upper_col > lower_col


def two_row_column_partition(spec: DeltaSpec, J: int, lo: int, hi: int) -> list[list[int]]:
    """Default column partition for the eventually-binary build.

    Columns lo..hi are grouped by their row-1 neighbourhood in row 2 of
    the two-row graph, refined by their adjacency pattern towards the
    first J columns (bonds are column-complete, so that pattern is
    row-free).  The refinement keeps cross-class edge insertion sound
    when bonds reach into the first J columns.
    """
    if hi < lo:
        return []
    part = n_delta_partition(spec, range(lo, hi + 1))
    r2_class = {}
    for idx, cls in enumerate(part.classes):
        for v in cls:
            r2_class[v.col] = idx
    keys: dict = {}
    for col in range(lo, hi + 1):
        key = (r2_class[col], tuple(_lower_adjacency(spec, c, col) for c in range(1, J + 1)))
        keys.setdefault(key, []).append(col)
    return sorted(keys.values(), key=lambda g: g[0])


def build_bounded_two_row(spec: DeltaSpec, G: GridGraph, J: int | None = None,
                          partition: list[list[int]] | None = None) -> LinearExpression:
    """Whole-graph build when alpha is binary beyond some column J.

    Rows go bottom-up; in each row the first-J columns get their own
    current labels and build their edges exactly, later columns
    alternate two current labels, and a finished vertex retires to a
    per-column label (first J columns) or its column-class label.
    """
    if J is None:
        report = classify(spec)
        if not report.eventually01:
            raise InputError("alpha has 2s or 3s forever; no J exists for this build")
        J = report.witness_j
    cols = G.columns()
    maxcol = cols[-1] if cols else J
    for c in range(J + 1, maxcol):
        if spec.alpha.letter(c) not in (0, 1):
            raise InputError(
                f"alpha letter at column {c} is {spec.alpha.letter(c)}, not binary beyond J={J}"
            )
    if partition is None:
        partition = two_row_column_partition(spec, J, J + 1, maxcol) if maxcol > J else []
    N = len(partition)
    budget = LabelBudget(formula="2J+N+2", params=(("J", J), ("N", N)), value=2 * J + N + 2)

    b = _Builder(G)
    if len(G) == 0:
        return b.finish(budget)

    pool = _LabelPool()
    a1, a2 = pool.get(("a", 1)), pool.get(("a", 2))
    class_of_col = {}
    for idx, group in enumerate(partition):
        for col in group:
            class_of_col[col] = idx

    def retire_label(v: GridVertex) -> int:
        if v.col <= J:
            return pool.get(("p", v.col))
        return pool.get(("s", class_of_col[v.col]))

    by_row: dict[int, list[GridVertex]] = {}
    for v in G.vertices:
        by_row.setdefault(v.row, []).append(v)

    for row in sorted(by_row):
        row_vs = sorted(by_row[row])
        firstJ = [v for v in row_vs if v.col <= J]
        rest = [v for v in row_vs if v.col > J]
        for idx, v in enumerate(firstJ):
            lab = pool.get(("c", v.col))
            b.add(v, lab)
            peers = set()
            for v2 in firstJ[:idx]:
                peers.add(pool.get(("c", v2.col)))
                if G.has_edge(v, v2):
                    b.join_exact(pool.get(("c", v2.col)), lab)
            b.join_classes(lab, v, skip=peers)
        prev = None
        if firstJ:
            for v in firstJ[:-1]:
                b.relabel(pool.get(("c", v.col)), pool.get(("p", v.col)))
            prev = firstJ[-1]
            b.relabel(pool.get(("c", prev.col)), a2)
        for v in rest:
            cur = a1 if (prev is None or b.label_of[prev] == a2) else a2
            b.add(v, cur)
            if prev is not None:
                if G.has_edge(v, prev):
                    b.join_exact(b.label_of[prev], cur)
                b.join_classes(cur, v, skip={b.label_of[prev]})
                b.relabel(b.label_of[prev], retire_label(prev))
            else:
                b.join_classes(cur, v)
            prev = v
        if prev is not None:
            b.relabel(b.label_of[prev], retire_label(prev))
    return b.finish(budget)


@dataclass
class PanelBuildInfo:
    """Derived quantities recorded alongside a panel-built expression."""

    panels: PanelDecomposition
    M: int
    N: int
    J: int
    k: int
    retire_class_counts: list[int] = field(default_factory=list)


def _panel_gap_intervals(panels: PanelDecomposition, lo: int, hi: int):
    """Column interval of each panel's non-window (gap) part."""
    ws = panels.windows
    if not ws:
        return [(lo, hi)]
    out = [(lo, ws[0].start - 1)]
    for prev, cur in zip(ws, ws[1:]):
        out.append((prev.start, cur.start - 1))
    out.append((ws[-1].start, hi))
    return out


def panel_parameters(spec: DeltaSpec, G: GridGraph, f: KFactor):
    """Observed M (strict bond-class bound), N (gap two-row classes) and
    J (gap 2/3-letter count) for a graph and window pattern."""
    cols = G.columns()
    hi = cols[-1] if cols else 2
    sup = spec.beta.certified_m_beta_sup()
    if sup is None:
        sup = max(m_beta(spec.beta, n) for n in range(2, max(hi, 3) + 1))
    M = sup + 1
    panels = build_panels(spec, G, f)
    N, J = 1, 0
    lo = cols[0] if cols else 1
    for start, end in _panel_gap_intervals(panels, lo, hi):
        if end >= start:
            N = max(N, len(two_row_column_partition(spec, 0, start, end)))
            J = max(J, sum(1 for x in range(start, end) if spec.alpha.letter(x) in (2, 3)))
    return M, N, J


def build_panel_expression(spec: DeltaSpec, G: GridGraph, factor_start: int, k: int,
                           M: int | None = None, N: int | None = None,
                           J: int | None = None):
    """Panel-by-panel build for graphs avoiding the square at the factor.

    Each panel goes up row by row with partition labels keyed by bond
    classes towards the remaining columns and two-row classes within the
    gap; window vertices take per-vein and per-slice labels instead.
    Finishing a panel retires every live label to a bond label of its
    similarity class against the unbuilt remainder, freeing the roster
    for the next panel.

    Returns (expression, PanelBuildInfo).
    """
    f = extract_k_factor(spec, factor_start, k)
    autoM, autoN, autoJ = panel_parameters(spec, G, f)
    M = autoM if M is None else M
    N = autoN if N is None else N
    J = autoJ if J is None else J
    budget = LabelBudget(
        formula="4k2+MN+M+2J+2",
        params=(("k", k), ("M", M), ("N", N), ("J", J)),
        value=4 * k * k + M * N + M + 2 * J + 2,
    )
    panels = build_panels(spec, G, f)
    info = PanelBuildInfo(panels=panels, M=M, N=N, J=J, k=k)
    b = _Builder(G)
    if len(G) == 0:
        return b.finish(budget), info

    pool = _LabelPool()
    a1, a2 = pool.get(("a", 1)), pool.get(("a", 2))
    cols = G.columns()
    mincol, maxcol = cols[0], cols[-1]
    windows = panels.windows

    for p_idx, panel in enumerate(panels.panels, start=1):
        window = windows[p_idx - 1] if p_idx - 1 < len(windows) else None
        next_start = window.start if window else maxcol + 1
        gap_lo = mincol if p_idx == 1 else windows[p_idx - 2].start
        gap_hi = next_start - 1

        # Yellow and red vertices in the window's first column belong to
        # later panels; link edges into them are row-sensitive, so the
        # gap columns are split by their adjacency profile towards them
        # on top of the bond and two-row classes.  The gap's last column
        # also carries a marker for its link letter into the window,
        # separating it from far columns whenever that letter connects
        # it to every lower vertex of the window's first column.
        boundary = []
        if window:
            boundary = sorted(v for v in window.colour_set("yellow") | window.colour_set("red")
                              if v.col == window.start)

        def seam_profile(v: GridVertex):
            marker = (_lower_adjacency(spec, v.col + 1, v.col)
                      if window and v.col == window.start - 1 else None)
            return (marker, tuple(G.has_edge(v, u) for u in boundary))

        bond_class: dict[int, int] = {}
        twor_class: dict[int, int] = {}
        if gap_hi >= gap_lo:
            groups: dict = {}
            for col in range(gap_lo, gap_hi + 1):
                fp = tuple(c for c in range(next_start, maxcol + 1) if spec.beta.contains(col, c))
                groups.setdefault(fp, []).append(col)
            if len(groups) > M:
                raise InvariantError(f"{len(groups)} bond classes exceed the given M={M}")
            for x, grp in enumerate(sorted(groups.values(), key=lambda g: g[0])):
                for col in grp:
                    bond_class[col] = x
            tr = two_row_column_partition(spec, 0, gap_lo, gap_hi)
            if len(tr) > N:
                raise InvariantError(f"{len(tr)} two-row classes exceed the given N={N}")
            for y, grp in enumerate(tr):
                for col in grp:
                    twor_class[col] = y

        # Blue and green labels are keyed by region and column, refined
        # by the exact adjacency towards the window's own yellow and red
        # set: the region rules almost always determine it, but merged
        # pinks next to 0-links can disagree with their slice mates.
        region_of: dict[GridVertex, tuple] = {}
        if window:
            d = window.decomposition
            own_yr = sorted(window.colour_set("yellow") | window.colour_set("red"))

            def yr_profile(v):
                return tuple(G.has_edge(v, u) for u in own_yr)

            for v in window.colour_set("blue"):
                _, i = d.region(v)
                region_of[v] = ("bc", i, v.col - window.start + 1, yr_profile(v))
            for v in window.colour_set("green"):
                _, i = d.region(v)
                region_of[v] = ("gc", i, v.col - window.start + 1, yr_profile(v))

        def retire_label(v: GridVertex) -> int:
            if v in region_of:
                return pool.get(region_of[v])
            return pool.get(("s", bond_class[v.col], twor_class[v.col], seam_profile(v)))

        by_row: dict[int, list[GridVertex]] = {}
        for v in panel:
            by_row.setdefault(v.row, []).append(v)
        for row in sorted(by_row):
            prev = None
            for v in sorted(by_row[row]):
                cur = a1 if (prev is None or b.label_of[prev] == a2) else a2
                b.add(v, cur)
                if prev is not None:
                    if G.has_edge(v, prev):
                        b.join_exact(b.label_of[prev], cur)
                    b.join_classes(cur, v, skip={b.label_of[prev]})
                    b.relabel(b.label_of[prev], retire_label(prev))
                else:
                    b.join_classes(cur, v)
                prev = v
            if prev is not None:
                b.relabel(b.label_of[prev], retire_label(prev))

        _retire_panel(b, G, panels, p_idx, pool, M, info)
        # current window's blue/green become the previous-panel families
        for key, lab in pool.items_of_kind("bc", "gc"):
            if b.members.get(lab):
                b.relabel(lab, pool.get(("bp" if key[0] == "bc" else "gp",) + key[1:]))
    return b.finish(budget), info


def _retire_panel(b: _Builder, G: GridGraph, panels: PanelDecomposition, p_idx: int,
                  pool: _LabelPool, M: int, info: PanelBuildInfo):
    """End-of-panel relabelling to similarity-class bond labels.

    Every live label except the current window's blue/green families is
    mapped to the bond label of its class against the unbuilt remainder.
    Old bond-label classes only merge as the remainder shrinks, so each
    label lands wholly inside one new class; merged classes keep one of
    their old labels and genuinely new classes take spare ones.
    """
    prefix = panels.prefix_union(p_idx)
    retiring = sorted(v for v in prefix
                      if pool.kind(b.label_of[v]) in ("m", "s", "bp", "gp"))
    if not retiring:
        info.retire_class_counts.append(0)
        return
    future_mask = 0
    for v in G.vertices:
        if v not in prefix:
            future_mask |= 1 << G.index[v]
    groups: dict[int, list[GridVertex]] = {}
    for v in retiring:
        groups.setdefault(G.neighbour_mask(G.index[v]) & future_mask, []).append(v)
    classes = sorted((tuple(sorted(g)) for g in groups.values()), key=lambda c: c[0])
    info.retire_class_counts.append(len(classes))

    class_of = {}
    for idx, cls in enumerate(classes):
        for v in cls:
            class_of[v] = idx
    label_to_class: dict[int, int] = {}
    for v in retiring:
        lab = b.label_of[v]
        got = label_to_class.setdefault(lab, class_of[v])
        if got != class_of[v]:
            raise InvariantError(
                f"label {lab} straddles two retirement classes; partition keys are too coarse"
            )
    rep: dict[int, int] = {}
    for lab, cls_idx in sorted(label_to_class.items()):
        if pool.kind(lab) == "m" and cls_idx not in rep:
            rep[cls_idx] = lab
    # absorb merged bond labels into their representatives first, so
    # every non-representative bond label is empty before reuse
    for lab, cls_idx in sorted(label_to_class.items()):
        if pool.kind(lab) == "m" and lab != rep[cls_idx]:
            b.relabel(lab, rep[cls_idx])
    taken = set(rep.values())
    spares = (pool.get(("m", i)) for i in range(1, len(classes) + M + len(label_to_class) + 2))
    for cls_idx in range(len(classes)):
        if cls_idx not in rep:
            rep[cls_idx] = next(lab for lab in spares if lab not in taken)
            taken.add(rep[cls_idx])
    for lab, cls_idx in sorted(label_to_class.items()):
        if pool.kind(lab) != "m":
            b.relabel(lab, rep[cls_idx])
