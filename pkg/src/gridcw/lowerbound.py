"""Distinguished pairings and the expression audit machinery.

A distinguished pairing (U, W) with U blue and W non-blue at a union
node certifies that the expression needs at least |U| labels there.
This module finds such pairings exhaustively at desk scale, extracts
them from single links and assembles them across links through couple
sets, and classifies the blue/red split of a square into its two
structural cases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cwx import (AuditColouring, Node, colour_at_node, label_count,
                  lowest_full_column_node, validate_against)
from .deltaspec import BondSource, DeltaSpec
from .errors import BudgetError, InputError, InvariantError
from .grid import GridGraph, GridVertex, adjacent, build_induced
from .params import mu


@dataclass(frozen=True)
class DistinguishedPairing:
    """Disjoint U, W with U's members told apart by their W-neighbourhoods."""

    U: tuple[GridVertex, ...]
    W: tuple[GridVertex, ...]
    flag: str  # "matched" | "unmatched" | "neither"
    exhaustive: bool = True

    @property
    def size(self) -> int:
        return len(self.U)


def verify_pairing(G: GridGraph, p: DistinguishedPairing) -> bool:
    """Recompute the defining property plus the matched/unmatched pairing."""
    if set(p.U) & set(p.W):
        return False
    sub = G.restrict(set(p.U) | set(p.W))
    if mu(sub, p.U) != p.size:
        return False
    if p.flag == "matched":
        return all(G.has_edge(u, w) for u, w in zip(p.U, p.W))
    if p.flag == "unmatched":
        return all(not G.has_edge(u, w) for u, w in zip(p.U, p.W))
    return True


def _distinct_classes(G: GridGraph, blues, wmask: int) -> list[list[GridVertex]]:
    groups: dict = {}
    for u in blues:
        groups.setdefault(G.neighbour_mask(G.index[u]) & wmask, []).append(u)
    return sorted(groups.values(), key=lambda g: g[0])


def _try_pair_up(G: GridGraph, U, W, want_edge: bool):
    """Perfect matching of U to W along (non-)edges, via augmenting paths."""
    match_of_w: dict = {}

    def augment(u, seen):
        for w in W:
            if w in seen:
                continue
            if G.has_edge(u, w) != want_edge:
                continue
            seen.add(w)
            if w not in match_of_w or augment(match_of_w[w], seen):
                match_of_w[w] = u
                return True
        return False

    for u in U:
        if not augment(u, set()):
            return None
    pairing = {u: w for w, u in match_of_w.items()}
    return [pairing[u] for u in U]


def find_largest_pairing(G: GridGraph, blue, nonblue,
                         subset_budget: int = 300_000) -> DistinguishedPairing:
    """Largest pairing with U inside blue and W inside nonblue.

    Exhausts W-subsets by decreasing size within the budget; beyond it a
    greedy W is grown instead and the result is flagged non-exhaustive.
    Either way the returned pairing itself is fully verified, so it is
    always a sound lower-bound certificate.
    """
    blues = sorted(set(blue))
    nons = sorted(set(nonblue))
    if set(blues) & set(nons):
        raise InputError("blue and nonblue sets must be disjoint")
    if not blues or not nons:
        return DistinguishedPairing(U=(), W=(), flag="neither")
    bit = {w: 1 << G.index[w] for w in nons}

    def mask_of(Wlist):
        m = 0
        for w in Wlist:
            m |= bit[w]
        return m

    best: tuple[tuple, tuple] | None = None
    explored = 0
    exhaustive = True
    rmax = min(len(blues), len(nons))
    for r in range(rmax, 0, -1):
        if best is not None:
            break
        for W in itertools.combinations(nons, r):
            explored += 1
            if explored > subset_budget:
                exhaustive = False
                break
            classes = _distinct_classes(G, blues, mask_of(W))
            if len(classes) >= r:
                U = tuple(sorted(cls[0] for cls in classes[:r]))
                best = (U, W)
                break
        else:
            continue
        if not exhaustive:
            break

    if best is None and not exhaustive:
        # greedy: grow W by whichever vertex splits the blue classes most,
        # then shrink it until every W vertex is pulling its weight
        W: list = []
        while len(W) < rmax:
            base = len(_distinct_classes(G, blues, mask_of(W)))
            pick = None
            for w in nons:
                if w in W:
                    continue
                cnt = len(_distinct_classes(G, blues, mask_of(W + [w])))
                if cnt > base:
                    base, pick = cnt, w
            if pick is None:
                break
            W.append(pick)
        while len(W) > len(_distinct_classes(G, blues, mask_of(W))):
            W.pop()
        classes = _distinct_classes(G, blues, mask_of(W))
        r = len(W)
        best = (tuple(sorted(cls[0] for cls in classes[:r])), tuple(W))
    if best is None:
        return DistinguishedPairing(U=(), W=(), flag="neither")

    U, W = best
    for flag, want in (("matched", True), ("unmatched", False)):
        ordered = _try_pair_up(G, U, W, want)
        if ordered is not None:
            p = DistinguishedPairing(U=U, W=tuple(ordered), flag=flag, exhaustive=exhaustive)
            if not verify_pairing(G, p):
                raise InvariantError("pairing failed its own re-verification")
            return p
    p = DistinguishedPairing(U=U, W=W, flag="neither", exhaustive=exhaustive)
    if not verify_pairing(G, p):
        raise InvariantError("pairing failed its own re-verification")
    return p


def pairing_from_horizontal_pairs(G: GridGraph, pairs):
    """Matched and unmatched pairings of size r-1 from r same-polarity
    horizontal blue-nonblue pairs on one link.

    Tries the aligned and the shifted-by-one pairings; whichever link
    type the column pair has, one alignment is matched and the other
    unmatched.
    """
    if len(pairs) < 3:
        raise InputError("need at least three same-polarity pairs")
    pairs = sorted(pairs, key=lambda p: p[0].row)
    blues = [p[0] for p in pairs]
    nons = [p[1] for p in pairs]
    if len({b.col for b in blues}) != 1 or len({n.col for n in nons}) != 1:
        raise InputError("pairs must share polarity (one blue column, one nonblue column)")
    r = len(pairs)
    aligned = DistinguishedPairing(
        U=tuple(blues[: r - 1]), W=tuple(nons[: r - 1]),
        flag="matched" if G.has_edge(blues[0], nons[0]) else "unmatched")
    shifted = DistinguishedPairing(
        U=tuple(blues[1:]), W=tuple(nons[: r - 1]),
        flag="matched" if G.has_edge(blues[1], nons[0]) else "unmatched")
    out = {}
    for p in (aligned, shifted):
        if not verify_pairing(G, p):
            raise InvariantError("horizontal pairing failed verification")
        out[p.flag] = p
    if set(out) != {"matched", "unmatched"}:
        raise InvariantError("expected one matched and one unmatched alignment")
    return out["matched"], out["unmatched"]


# --- single-link pair extraction -------------------------------------------


@dataclass(frozen=True)
class LinkPairs:
    adjacent_pair: tuple[GridVertex, GridVertex] | None  # (blue, nonblue)
    nonadjacent_pair: tuple[GridVertex, GridVertex] | None
    case: str


def _first_cross_pair(G: GridGraph, blues, nons, want_edge: bool):
    for b in blues:
        for n in nons:
            if b.col != n.col and G.has_edge(b, n) == want_edge:
                return (b, n)
    return None


def link_pair_extraction(link: GridGraph, colour: dict, alpha_letter: int) -> LinkPairs:
    """Adjacent and non-adjacent blue-nonblue pairs inside one link.

    Hypotheses accepted: a horizontal blue-blue pair with a nonblue
    vertex in each column away from the extreme rows, or a horizontal
    blue-nonblue pair with a second nonblue vertex above or below the
    blue one.  The fifth-vertex fallback of the chain-letter cases is
    realised by scanning for the missing polarity, which the hypothesis
    guarantees to exist.
    """
    cols = link.columns()
    if len(cols) != 2 or cols[1] - cols[0] != 1:
        raise InputError("a link spans exactly two consecutive columns")
    if link.spec.alpha.letter(cols[0]) != alpha_letter:
        raise InputError(
            f"link letter is {link.spec.alpha.letter(cols[0])}, caller said {alpha_letter}"
        )
    blues = sorted(v for v in link.vertices if colour.get(v) == "blue")
    nons = sorted(v for v in link.vertices if colour.get(v) not in (None, "blue"))
    rows = link.rows()
    inner_blues = [b for b in blues if rows[0] < b.row < rows[-1]]

    has_blue_blue = any(
        b1.row == b2.row for b1 in inner_blues for b2 in inner_blues if b1.col < b2.col
    )
    per_col_non = all(any(n.col == c for n in nons) for c in cols)
    has_bn_with_samecol = any(
        any(n.row == b.row and n.col != b.col for n in nons)
        and any(n.col == b.col for n in nons)
        for b in inner_blues
    )
    if has_blue_blue and per_col_non:
        case = "blue-blue"
    elif has_bn_with_samecol:
        case = "blue-nonblue"
    else:
        return LinkPairs(adjacent_pair=None, nonadjacent_pair=None, case="not-applicable")

    adj = _first_cross_pair(link, blues, nons, True)
    non = _first_cross_pair(link, blues, nons, False)
    if case == "blue-blue":
        if alpha_letter in (0, 2, 3) and non is None:
            raise InvariantError("hypothesis promised a non-adjacent pair")
        if alpha_letter in (1, 2, 3) and adj is None:
            raise InvariantError("hypothesis promised an adjacent pair")
    else:
        if adj is None or non is None:
            raise InvariantError("hypothesis promised both pair polarities")
    return LinkPairs(adjacent_pair=adj, nonadjacent_pair=non, case=case)


# --- couple sets and cross-link assembly ------------------------------------


@dataclass(frozen=True)
class CoupleSet:
    """Column indices pairwise more than two apart, with bond density flags."""

    columns: tuple[int, ...]
    beta: BondSource

    def __post_init__(self):
        cols = sorted(self.columns)
        for a, b in zip(cols, cols[1:]):
            if b - a <= 2:
                raise InputError(f"couple set columns {a},{b} are too close")

    def dense(self, x: int, y: int) -> bool:
        return self.beta.contains(x, y + 1) and self.beta.contains(x + 1, y)

    def sparse(self, x: int, y: int) -> bool:
        return not self.beta.contains(x, y + 1) and not self.beta.contains(x + 1, y)

    def pairs(self):
        return itertools.combinations(sorted(self.columns), 2)


def assemble_cross_link_pairing(spec: DeltaSpec, P: CoupleSet, link_pairs: dict,
                                matched: bool) -> DistinguishedPairing:
    """Combine one blue-nonblue pair per link into a pairing of size |P|.

    For the matched flavour the links contribute adjacent pairs and no
    couple may be bond-dense; for the unmatched flavour non-adjacent
    pairs and no bond-sparse couple.  Same polarity throughout.
    """
    cols = sorted(P.columns)
    if set(link_pairs) != set(cols):
        raise InputError("need exactly one pair per couple-set column")
    polarity = None
    for y in cols:
        b, n = link_pairs[y]
        if {b.col, n.col} != {y, y + 1}:
            raise InputError(f"pair for link {y} must sit on columns {y},{y + 1}")
        if adjacent(spec, b, n) != matched:
            kind = "adjacent" if matched else "non-adjacent"
            raise InputError(f"pair for link {y} is not {kind}")
        pol = "blue-left" if b.col == y else "blue-right"
        if polarity is None:
            polarity = pol
        elif polarity != pol:
            raise InputError(f"pair for link {y} breaks the common polarity")
    for x, y in P.pairs():
        if matched and P.dense(x, y):
            raise InputError(f"couple ({x},{y}) is bond-dense; matched assembly impossible")
        if not matched and P.sparse(x, y):
            raise InputError(f"couple ({x},{y}) is bond-sparse; unmatched assembly impossible")

    U = tuple(link_pairs[y][0] for y in cols)
    W = tuple(link_pairs[y][1] for y in cols)
    p = DistinguishedPairing(U=U, W=W, flag="matched" if matched else "unmatched")
    host = build_induced(spec, set(U) | set(W))
    if not verify_pairing(host, p):
        raise InvariantError("cross-link pairing failed brute-force re-verification")
    return p


def ramsey_threshold(r: int) -> int:
    """Order forcing a clique or independent set of size r."""
    if r < 2:
        raise InputError(f"need r >= 2, got {r}")
    return 2 ** (2 * r - 3)


def case1_n(r: int) -> int:
    """Square side beyond which the scattered-pairs case yields r labels."""
    return 9 * 2 ** (4 * r - 1)


def case2_m23(r: int) -> int:
    """Chain-letter count beyond which the long-run case yields r labels."""
    return 3 * 2 ** (2 * r)


def mono_density_subset(P: CoupleSet, r: int):
    """r columns of P pairwise bond-dense or pairwise bond-free.

    Guaranteed to exist when |P| reaches the Ramsey threshold; smaller
    sets are searched anyway and may come back empty.
    """
    cols = sorted(P.columns)
    for Q in itertools.combinations(cols, r):
        if all(P.dense(x, y) for x, y in itertools.combinations(Q, 2)):
            return Q, "clique"
    for Q in itertools.combinations(cols, r):
        if all(not P.dense(x, y) for x, y in itertools.combinations(Q, 2)):
            return Q, "independent"
    if len(cols) >= ramsey_threshold(r):
        raise InvariantError("Ramsey threshold met but no monochromatic subset found")
    return None


# --- case classification and the audit --------------------------------------


@dataclass(frozen=True)
class CaseReport:
    case: str  # "case1" | "case2" | "neither-applicable"
    column: int | None
    swapped: bool
    rows: tuple[int, ...]
    pairs: tuple[tuple[GridVertex, GridVertex], ...]
    run: tuple[GridVertex, ...]

    def summary(self) -> str:
        head = f"{self.case} at column {self.column}" + (" (colours swapped)" if self.swapped else "")
        if self.case == "case1":
            return head + f"; {len(self.pairs)} horizontal blue-nonblue pairs"
        if self.case == "case2":
            return head + f"; blue run of {len(self.run)} on row {self.run[0].row if self.run else '-'}"
        return head


def classify_case(colouring: AuditColouring, H: GridGraph) -> CaseReport:
    """Sort the split at a union node into scattered-pairs or long-run form.

    Picks a column whose interior is fully non-white, swapping blue and
    red if red dominates it; the long-run case needs a blue row through
    the column to each side, anything else yields horizontal pairs.
    """
    rows = H.rows()
    cols = H.columns()
    n = len(rows)
    if n <= 2:
        return CaseReport(case="neither-applicable", column=None, swapped=False,
                          rows=(), pairs=(), run=())
    interior = rows[1:-1]

    def col_colours(c):
        return [colouring.colour.get(GridVertex(c, r), "white") for r in interior]

    chosen = None
    for c in cols:
        cc = col_colours(c)
        if all(col != "white" for col in cc):
            chosen = c
            break
    if chosen is None:
        return CaseReport(case="neither-applicable", column=None, swapped=False,
                          rows=(), pairs=(), run=())
    cc = col_colours(chosen)
    swapped = cc.count("blue") < cc.count("red")
    blue = ("red" if swapped else "blue")

    def is_blue(c, r):
        return colouring.colour.get(GridVertex(c, r), "white") == blue

    blue_rows = [r for r in interior if is_blue(chosen, r)]
    right_full = [r for r in blue_rows if all(is_blue(c, r) for c in cols if c > chosen)]
    left_full = [r for r in blue_rows if all(is_blue(c, r) for c in cols if c < chosen)]

    if right_full and left_full:
        runs = []
        for r in right_full:
            run = [GridVertex(c, r) for c in cols if c >= chosen]
            lo = [c for c in cols if c < chosen]
            while lo and is_blue(lo[-1], r):
                run.insert(0, GridVertex(lo.pop(), r))
            runs.append(tuple(run))
        for r in left_full:
            run = [GridVertex(c, r) for c in cols if c <= chosen]
            hi = [c for c in cols if c > chosen]
            for c in hi:
                if is_blue(c, r):
                    run.append(GridVertex(c, r))
                else:
                    break
            runs.append(tuple(run))
        best = max(runs, key=len)
        return CaseReport(case="case2", column=chosen, swapped=swapped,
                          rows=(right_full[0], left_full[0]), pairs=(), run=best)

    pairs = []
    direction = 1 if not right_full else -1
    scan = [c for c in cols if c > chosen] if direction == 1 else [c for c in reversed(cols) if c < chosen]
    for r in blue_rows:
        prev = chosen
        for c in scan:
            if is_blue(c, r):
                prev = c
                continue
            pairs.append((GridVertex(prev, r), GridVertex(c, r)))
            break
    return CaseReport(case="case1", column=chosen, swapped=swapped,
                      rows=tuple(blue_rows), pairs=tuple(pairs), run=())


@dataclass(frozen=True)
class AuditReport:
    node_path: tuple[int, ...]
    colouring: AuditColouring
    case: CaseReport
    pairing: DistinguishedPairing
    blue_labels: tuple
    holds: bool

    def summary(self) -> str:
        lines = [f"union node at path {list(self.node_path)}"]
        census: dict = {}
        for v, c in self.colouring.colour.items():
            census.setdefault(v.col, {}).setdefault(c, 0)
            census[v.col][c] += 1
        for col in sorted(census):
            parts = " ".join(f"{c}={census[col][c]}" for c in sorted(census[col]))
            lines.append(f"  column {col}: {parts}")
        lines.append(self.case.summary())
        lines.append(
            f"pairing size {self.pairing.size} ({self.pairing.flag}"
            + ("" if self.pairing.exhaustive else ", greedy") + ")"
        )
        lines.append(f"  U: {[tuple(v) for v in self.pairing.U]}")
        lines.append(f"  W: {[tuple(v) for v in self.pairing.W]}")
        lines.append(f"blue-side labels at the node: {sorted(self.blue_labels)}")
        lines.append(f"labels >= pairing size: {self.holds}")
        return "\n".join(lines)


def audit_expression(e: Node, H: GridGraph) -> AuditReport | None:
    """Check the label count at the lowest full-column union node.

    Validates the expression, colours the vertex set at that node,
    classifies the case, finds a distinguished pairing of blue against
    non-blue, and compares the pairing size with the number of distinct
    labels on blue vertices.  Returns None when H has no interior rows.
    """
    ok, diff = validate_against(e, H)
    if not ok:
        raise InputError(f"expression does not build the target: {diff}")
    path = lowest_full_column_node(e, H)
    if path is None:
        return None
    colouring = colour_at_node(e, path, set(H.vertices))
    case = classify_case(colouring, H)
    blue = colouring.of_colour("blue")
    nonblue = set(H.vertices) - blue
    pairing = find_largest_pairing(H, blue, nonblue)
    blue_labels = {colouring.label[v] for v in blue if colouring.label[v] is not None}
    holds = len(blue_labels) >= pairing.size
    return AuditReport(node_path=path, colouring=colouring, case=case,
                       pairing=pairing, blue_labels=tuple(blue_labels), holds=holds)
