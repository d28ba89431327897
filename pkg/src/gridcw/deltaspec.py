"""Finitely-described column-rule triples and their factor calculus.

A triple (alpha, beta, gamma) describes an infinite graph on a grid of
vertices: alpha is an infinite word over {0,1,2,3} giving the edge rule
between consecutive columns, beta is a symmetric bond set joining
non-consecutive columns completely, and gamma is an infinite binary word
marking which columns are cliques.  Words are stored as an explicit
prefix plus a repeating period, which keeps every classification
question asked here decidable.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

from .errors import InputError, SpecParseError

ALPHA_ALPHABET = frozenset((0, 1, 2, 3))
GAMMA_ALPHABET = frozenset((0, 1))

# Bond kinds whose membership test is invariant under shifting both
# endpoints by the given modulus.  Kinds absent from this table (hub,
# non-empty explicit sets) pin bonds to fixed columns and therefore
# break recurrence.
_SHIFT_MODULUS = {
    "empty": 1,
    "offset": 1,
    "range": 1,
    "parity-odd-diff": 1,
    "parity-even-diff": 1,
    "table1-bichain": 2,
    "table1-split": 2,
}


@dataclass(frozen=True)
class WordSource:
    """An infinite word given by a finite prefix and a repeating period."""

    prefix: tuple[int, ...]
    period: tuple[int, ...]
    alphabet: frozenset[int] = ALPHA_ALPHABET

    def __post_init__(self):
        if not self.period:
            raise InputError("word period must be non-empty")
        bad = [x for x in self.prefix + self.period if x not in self.alphabet]
        if bad:
            raise InputError(f"letters {bad} outside alphabet {sorted(self.alphabet)}")

    @classmethod
    def from_text(cls, prefix: str, period: str, alphabet=ALPHA_ALPHABET) -> "WordSource":
        def digits(s):
            if not re.fullmatch(r"[0-9]*", s):
                raise InputError(f"word letters must be digits, got {s!r}")
            return tuple(int(c) for c in s)

        return cls(digits(prefix), digits(period), frozenset(alphabet))

    def letter(self, i: int) -> int:
        """Letter at 1-based position i; total for every i >= 1."""
        if i < 1:
            raise InputError(f"word index must be >= 1, got {i}")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.period[(i - len(self.prefix) - 1) % len(self.period)]

    def letters(self, lo: int, hi: int) -> tuple[int, ...]:
        """Letters at positions lo..hi inclusive (empty if hi < lo)."""
        return tuple(self.letter(i) for i in range(lo, hi + 1))

    def is_recurrent(self) -> bool:
        # An eventually periodic word is recurrent exactly when it is
        # periodic from position 1 with the period length.
        p = len(self.period)
        return all(self.letter(i) == self.letter(i + p) for i in range(1, len(self.prefix) + 1))

    def as_text(self) -> str:
        pre = "".join(str(x) for x in self.prefix)
        per = "".join(str(x) for x in self.period)
        return f"prefix={pre} period={per}"


def letter_at(source: WordSource, i: int) -> int:
    return source.letter(i)


@dataclass(frozen=True)
class BondSource:
    """A symmetric set of column pairs (x, y) with |x - y| > 1.

    Only a closed set of rule kinds is supported so that boundedness of
    the one-row neighbourhood parameter can be certified per kind:

    - ``empty``
    - ``explicit``: a finite set of pairs
    - ``offset d``: pairs at distance exactly d (d > 1)
    - ``range n``: pairs at distance in (1, n]
    - ``parity-odd-diff``: distance odd and > 1
    - ``parity-even-diff``: distance even and > 0
    - ``table1-bichain``: smaller endpoint even, distance odd and >= 3
    - ``table1-split``: smaller endpoint even, distance >= 2
    - ``hub c``: pairs joining column c to every column at distance > 1
    """

    kind: str
    pairs: frozenset[tuple[int, int]] = frozenset()
    param: int = 0

    def __post_init__(self):
        if self.kind in ("offset", "range") and self.param <= 1:
            raise InputError(f"{self.kind} parameter must be > 1, got {self.param}")
        if self.kind == "hub" and self.param < 1:
            raise InputError(f"hub column must be >= 1, got {self.param}")
        for x, y in self.pairs:
            if abs(x - y) <= 1 or x < 1 or y < 1:
                raise InputError(f"explicit bond ({x},{y}) must join distinct non-consecutive columns >= 1")

    @classmethod
    def empty(cls) -> "BondSource":
        return cls("empty")

    @classmethod
    def explicit(cls, pairs) -> "BondSource":
        norm = frozenset((min(x, y), max(x, y)) for x, y in pairs)
        return cls("explicit", pairs=norm)

    @classmethod
    def offset(cls, d: int) -> "BondSource":
        return cls("offset", param=d)

    @classmethod
    def distance_range(cls, n: int) -> "BondSource":
        return cls("range", param=n)

    @classmethod
    def hub(cls, c: int = 1) -> "BondSource":
        return cls("hub", param=c)

    def contains(self, x: int, y: int) -> bool:
        """Symmetric membership test; always false at distance <= 1."""
        if x < 1 or y < 1:
            raise InputError(f"column indices must be >= 1, got ({x},{y})")
        d = abs(x - y)
        if d <= 1:
            return False
        k = self.kind
        if k == "empty":
            return False
        if k == "explicit":
            return (min(x, y), max(x, y)) in self.pairs
        if k == "offset":
            return d == self.param
        if k == "range":
            return d <= self.param
        if k == "parity-odd-diff":
            return d % 2 == 1
        if k == "parity-even-diff":
            return d % 2 == 0
        if k == "table1-bichain":
            return min(x, y) % 2 == 0 and d % 2 == 1 and d >= 3
        if k == "table1-split":
            return min(x, y) % 2 == 0
        if k == "hub":
            return x == self.param or y == self.param
        raise InputError(f"unknown bond kind {k!r}")

    def pairs_within(self, lo: int, hi: int) -> frozenset[tuple[int, int]]:
        """All bonds with both endpoints in [lo, hi]."""
        out = set()
        for x in range(lo, hi - 1):
            for y in range(x + 2, hi + 1):
                if self.contains(x, y):
                    out.add((x, y))
        return frozenset(out)

    def shift_modulus(self):
        """Shift period under which membership is invariant, or None."""
        if self.kind == "explicit" and not self.pairs:
            return 1
        return _SHIFT_MODULUS.get(self.kind)

    def certified_m_beta_sup(self):
        """Exact supremum of the one-row class-count parameter, or None.

        Per-kind values; the finite kinds are scanned outright, the rule
        kinds follow from the interval structure of their in-context
        neighbourhoods (cross-checked numerically in the test suite).
        """
        k = self.kind
        if k == "empty":
            return 1
        if k == "explicit":
            if not self.pairs:
                return 1
            from .params import m_beta  # cycle-free at call time

            top = max(y for _, y in self.pairs)
            return max(m_beta(self, n) for n in range(2, top + 3))
        if k == "offset":
            return self.param + 1
        if k == "range":
            return self.param + 1
        if k == "parity-odd-diff":
            return 3
        if k == "parity-even-diff":
            return 2
        if k == "table1-bichain":
            return 3
        if k == "table1-split":
            return 3
        if k == "hub":
            return 2
        return None

    def as_text(self) -> str:
        k = self.kind
        if k == "explicit":
            body = ";".join(f"({x},{y})" for x, y in sorted(self.pairs))
            return f"explicit {body}"
        if k == "offset":
            return f"offset d={self.param}"
        if k == "range":
            return f"range n={self.param}"
        if k == "hub":
            return f"hub c={self.param}"
        return k


@dataclass(frozen=True)
class DeltaSpec:
    """A (alpha, beta, gamma) triple answering queries at any column."""

    alpha: WordSource
    beta: BondSource
    gamma: WordSource
    name: str | None = None

    def __post_init__(self):
        if not self.alpha.alphabet <= ALPHA_ALPHABET:
            raise InputError("alpha letters must lie in {0,1,2,3}")
        if not self.gamma.alphabet <= GAMMA_ALPHABET:
            raise InputError("gamma letters must lie in {0,1}")

    @classmethod
    def make(cls, alpha_prefix="", alpha_period="0", beta=None, gamma_prefix="",
             gamma_period="0", name=None) -> "DeltaSpec":
        return cls(
            alpha=WordSource.from_text(alpha_prefix, alpha_period, ALPHA_ALPHABET),
            beta=beta if beta is not None else BondSource.empty(),
            gamma=WordSource.from_text(gamma_prefix, gamma_period, GAMMA_ALPHABET),
            name=name,
        )


@dataclass(frozen=True)
class KFactor:
    """A width-k window of a triple, rebased to offsets 0..k-1.

    Carries the k-1 alpha letters between the window's columns, the
    bonds with both endpoints inside the window, and the k gamma
    letters.  Bonds leaving the window are deliberately ignored.
    """

    start: int
    alpha: tuple[int, ...]
    bonds: frozenset[tuple[int, int]]
    gamma: tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.gamma)

    def __post_init__(self):
        k = len(self.gamma)
        if k < 2:
            raise InputError(f"factor width must be >= 2, got {k}")
        if len(self.alpha) != k - 1:
            raise InputError("factor must carry width-1 alpha letters")
        for a, b in self.bonds:
            if not (0 <= a < b <= k - 1):
                raise InputError(f"rebased bond ({a},{b}) outside window offsets")


def extract_k_factor(spec: DeltaSpec, j: int, k: int) -> KFactor:
    """Window of width k starting at column j (both 1-based)."""
    if j < 1 or k < 2:
        raise InputError(f"need j >= 1 and k >= 2, got j={j}, k={k}")
    hi = j + k - 1
    bonds = frozenset((a - j, b - j) for a, b in spec.beta.pairs_within(j, hi))
    return KFactor(
        start=j,
        alpha=spec.alpha.letters(j, hi - 1),
        bonds=bonds,
        gamma=spec.gamma.letters(j, hi),
    )


def factors_equal(f1: KFactor, f2: KFactor) -> bool:
    """Equality of same-width windows after rebasing, start ignored."""
    if f1.width != f2.width:
        raise InputError(f"cannot compare factors of widths {f1.width} and {f2.width}")
    return f1.alpha == f2.alpha and f1.bonds == f2.bonds and f1.gamma == f2.gamma


def find_next_occurrence(spec: DeltaSpec, f: KFactor, after: int, horizon: int):
    """Smallest start j > after with the window fitting below horizon, or None."""
    k = f.width
    for j in range(max(after + 1, 1), horizon - k + 2):
        if factors_equal(extract_k_factor(spec, j, k), f):
            return j
    return None


@dataclass(frozen=True)
class ClassificationReport:
    """What can be decided (or probed) about a triple.

    ``recurrent`` and the witness fields are exact for the prefix+period
    word sources and closed bond-kind enum this package supports;
    membership of the unbounded-width family is a certificate when alpha
    repeats 2s/3s forever and otherwise only probe evidence.
    """

    eventually01: bool
    witness_j: int
    m23: tuple[int, ...]
    recurrent: str  # "yes" | "no" | "undecidable-for-spec-kind"
    recurrent_witness: str
    in_delta: str  # "yes" | "no-evidence"
    in_delta_basis: str
    n_delta_curve: tuple[tuple[int, int], ...]
    in_delta_min: str  # "yes" | "no" | "unknown"
    min_conditions: tuple[tuple[str, str], ...]

    def summary(self) -> str:
        lines = [
            f"eventually01: {self.eventually01} (witness J={self.witness_j})",
            f"m23: {list(self.m23)}",
            f"recurrent: {self.recurrent} ({self.recurrent_witness})",
            f"in-Delta: {self.in_delta} ({self.in_delta_basis})",
            f"in-Delta-min: {self.in_delta_min}",
        ]
        lines += [f"  condition {name}: {verdict}" for name, verdict in self.min_conditions]
        return "\n".join(lines)


def _word_tail_letters(word: WordSource):
    return set(word.period)


def classify(spec: DeltaSpec, probe_depth: int = 16) -> ClassificationReport:
    """Classify a triple by scanning its finite description.

    probe_depth controls how far the two-row neighbourhood count is
    evaluated; the count at depth n reaching ceil(n/2) is reported as
    unboundedness evidence (a probe, not a proof).
    """
    from .params import n_delta

    if probe_depth < 4:
        raise InputError(f"probe_depth must be >= 4, got {probe_depth}")

    alpha = spec.alpha
    tail23 = _word_tail_letters(alpha) & {2, 3}
    eventually01 = not tail23
    witness_j = 0
    if eventually01:
        for i in range(len(alpha.prefix), 0, -1):
            if alpha.prefix[i - 1] in (2, 3):
                witness_j = i
                break

    m23 = tuple(
        sum(1 for i in range(1, n) if alpha.letter(i) in (2, 3))
        for n in range(1, probe_depth + 1)
    )

    # Recurrence: both words must repeat from position 1 and the bond
    # rule must be shift-invariant (possibly modulo 2); a bond pinned to
    # fixed columns yields a window that occurs exactly once.
    words_ok = alpha.is_recurrent() and spec.gamma.is_recurrent()
    modulus = spec.beta.shift_modulus()
    if modulus is None:
        recurrent = "no"
        recurrent_witness = f"bond kind {spec.beta.kind} pins bonds to fixed columns"
    elif not words_ok:
        recurrent = "no"
        which = "alpha" if not alpha.is_recurrent() else "gamma"
        recurrent_witness = f"{which} prefix disagrees with its periodic tail"
    else:
        recurrent = "yes"
        lcm = math.lcm(len(alpha.period), len(spec.gamma.period), modulus)
        recurrent_witness = f"every window recurs at shifts of {lcm}"

    curve = tuple((n, n_delta(spec, range(1, n + 1))) for n in range(2, probe_depth + 1))
    if tail23:
        in_delta = "yes"
        basis = "alpha period contains a 2 or 3"
    elif curve[-1][1] >= math.ceil(probe_depth / 2):
        in_delta = "yes"
        basis = f"two-row class count reached {curve[-1][1]} at depth {probe_depth} (probe evidence, not proof)"
    else:
        in_delta = "no-evidence"
        basis = f"two-row class count stayed at {curve[-1][1]} up to depth {probe_depth}"

    m_sup = spec.beta.certified_m_beta_sup()
    conditions = []
    conditions.append(("recurrent", recurrent))
    if recurrent == "yes":
        gap_verdict = "yes (periodic: gap windows have bounded width)"
    elif recurrent == "no":
        gap_verdict = "no (not recurrent)"
    else:
        gap_verdict = "unknown"
    conditions.append(("gap-factors-bounded", gap_verdict))
    conditions.append(
        ("m-beta-bounded", f"yes (sup {m_sup})" if m_sup is not None else "unknown-for-kind")
    )

    if recurrent == "yes" and m_sup is not None and in_delta == "yes":
        in_delta_min = "yes"
    elif recurrent == "no" or in_delta == "no-evidence":
        in_delta_min = "no" if recurrent == "no" else "unknown"
    else:
        in_delta_min = "unknown"

    return ClassificationReport(
        eventually01=eventually01,
        witness_j=witness_j,
        m23=m23,
        recurrent=recurrent,
        recurrent_witness=recurrent_witness,
        in_delta=in_delta,
        in_delta_basis=basis,
        n_delta_curve=curve,
        in_delta_min=in_delta_min,
        min_conditions=tuple(conditions),
    )


def alpha_plus(spec: DeltaSpec) -> DeltaSpec:
    """Collapse alpha letterwise by 1 -> 0 and 3 -> 2, keeping beta and gamma."""
    table = {0: 0, 1: 0, 2: 2, 3: 2}
    mapped = WordSource(
        prefix=tuple(table[x] for x in spec.alpha.prefix),
        period=tuple(table[x] for x in spec.alpha.period),
        alphabet=ALPHA_ALPHABET,
    )
    name = None if spec.name is None else spec.name + "+"
    return DeltaSpec(alpha=mapped, beta=spec.beta, gamma=spec.gamma, name=name)


# --- text format -----------------------------------------------------------
#
#   alpha prefix=<digits> period=<digits>
#   gamma prefix=<bits> period=<bits>
#   beta <empty | explicit (x,y);... | offset d=N | range n=N |
#         parity-odd-diff | parity-even-diff | table1-bichain |
#         table1-split | hub c=N>
#   name <string>            (optional)
#
# '#' starts a comment; blank lines are ignored.

_PAIR_RE = re.compile(r"\((\d+),(\d+)\)")


def _parse_word_line(rest: str, alphabet, lineno: int) -> WordSource:
    prefix, period = "", None
    for tok in rest.split():
        if tok.startswith("prefix="):
            prefix = tok[len("prefix="):]
        elif tok.startswith("period="):
            period = tok[len("period="):]
        else:
            raise SpecParseError(f"unexpected token {tok!r} in word line", line=lineno)
    if not period:
        raise SpecParseError("word line needs a non-empty period=", line=lineno)
    return WordSource.from_text(prefix, period, alphabet)


def _parse_beta_line(rest: str, lineno: int) -> BondSource:
    toks = rest.split(None, 1)
    if not toks:
        raise SpecParseError("empty beta line", line=lineno)
    kind, tail = toks[0], toks[1] if len(toks) > 1 else ""
    try:
        if kind == "empty":
            return BondSource.empty()
        if kind == "explicit":
            pairs = [(int(a), int(b)) for a, b in _PAIR_RE.findall(tail)]
            body = _PAIR_RE.sub("", tail).replace(";", "").strip()
            if body:
                raise SpecParseError(f"bad explicit pair syntax near {body!r}", line=lineno)
            return BondSource.explicit(pairs)
        if kind == "offset":
            m = re.fullmatch(r"d=(\d+)", tail.strip())
            if not m:
                raise SpecParseError("offset needs d=<int>", line=lineno)
            return BondSource.offset(int(m.group(1)))
        if kind == "range":
            m = re.fullmatch(r"n=(\d+)", tail.strip())
            if not m:
                raise SpecParseError("range needs n=<int>", line=lineno)
            return BondSource.distance_range(int(m.group(1)))
        if kind == "hub":
            m = re.fullmatch(r"c=(\d+)", tail.strip())
            if not m:
                raise SpecParseError("hub needs c=<int>", line=lineno)
            return BondSource.hub(int(m.group(1)))
        if kind in ("parity-odd-diff", "parity-even-diff", "table1-bichain", "table1-split"):
            if tail.strip():
                raise SpecParseError(f"{kind} takes no parameters", line=lineno)
            return BondSource(kind)
    except InputError as exc:
        raise SpecParseError(str(exc), line=lineno) from exc
    raise SpecParseError(f"unknown beta kind {kind!r}", line=lineno)


def parse_spec(text: str) -> DeltaSpec:
    alpha = beta = gamma = None
    name = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "alpha":
            alpha = _parse_word_line(rest, ALPHA_ALPHABET, lineno)
        elif key == "gamma":
            gamma = _parse_word_line(rest, GAMMA_ALPHABET, lineno)
        elif key == "beta":
            beta = _parse_beta_line(rest, lineno)
        elif key == "name":
            name = rest.strip()
        else:
            raise SpecParseError(f"unknown directive {key!r}", line=lineno)
    if alpha is None or beta is None or gamma is None:
        missing = [n for n, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)) if v is None]
        raise SpecParseError(f"spec text missing: {', '.join(missing)}")
    return DeltaSpec(alpha=alpha, beta=beta, gamma=gamma, name=name)


def serialize_spec(spec: DeltaSpec) -> str:
    lines = [
        f"alpha {spec.alpha.as_text()}",
        f"gamma {spec.gamma.as_text()}",
        f"beta {spec.beta.as_text()}",
    ]
    if spec.name:
        lines.append(f"name {spec.name}")
    return "\n".join(lines) + "\n"


def load_spec(path) -> DeltaSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read())
