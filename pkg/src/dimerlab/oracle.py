"""Exact combinatorial ground truth for dimer and double-dimer counts.

Sites are 1-based ``(m, n)`` pairs with ``1 <= m <= M`` (columns) and
``1 <= n <= N`` (rows).  An edge is a pair of nearest-neighbour sites stored
with the smaller site first; a matching is a tuple of edges sorted
lexicographically.  Nothing in this module touches floating point.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import (
    DimensionTooLarge,
    EnumerationCapExceeded,
    MalformedSuperposition,
)

Site = tuple[int, int]
Edge = tuple[Site, Site]
Matching = tuple[Edge, ...]

MAX_PROFILE_WIDTH = 24
DEFAULT_ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class GridSpec:
    M: int
    N: int

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.M}x{self.N}")

    def contains(self, site: Site) -> bool:
        m, n = site
        return 1 <= m <= self.M and 1 <= n <= self.N

    def sites(self) -> list[Site]:
        return [(m, n) for m in range(1, self.M + 1) for n in range(1, self.N + 1)]

    @property
    def corners(self) -> tuple[Site, Site, Site, Site]:
        """Corners in the order bottom-left, bottom-right, top-left, top-right."""
        M, N = self.M, self.N
        return (1, 1), (M, 1), (1, N), (M, N)

    def require_hookup_shape(self):
        if self.M % 2 or self.N % 2 == 0:
            raise ValueError(f"hook-up needs M even and N odd, got M={self.M}, N={self.N}")
        if self.M < 2 or self.N < 3:
            raise ValueError(f"hook-up needs M >= 2 and N >= 3, got M={self.M}, N={self.N}")


def _as_grid(grid) -> GridSpec:
    if isinstance(grid, GridSpec):
        return grid
    return GridSpec(*grid)


def _check_monomers(grid: GridSpec, monomers: Iterable[Site]) -> frozenset[Site]:
    removed = [tuple(s) for s in monomers]
    for s in removed:
        if not grid.contains(s):
            raise ValueError(f"monomer {s} outside {grid.M}x{grid.N} grid")
    if len(set(removed)) != len(removed):
        raise ValueError(f"monomer sites must be distinct: {removed}")
    return frozenset(removed)


def count_matchings(grid, monomers: Iterable[Site] = ()) -> int:
    """Number of perfect matchings of the grid graph with ``monomers`` deleted.

    Broken-profile DP: the frontier runs along the shorter side, and bit ``r``
    of the state says whether cell ``r`` of the frontier is already covered.
    """
    grid = _as_grid(grid)
    removed = _check_monomers(grid, monomers)
    if (grid.M * grid.N - len(removed)) % 2:
        return 0

    # (col, row) coordinates with rows along the shorter side
    if grid.N <= grid.M:
        cols, width = grid.M, grid.N
        blocked = {(m - 1, n - 1) for m, n in removed}
    else:
        cols, width = grid.N, grid.M
        blocked = {(n - 1, m - 1) for m, n in removed}
    if width > MAX_PROFILE_WIDTH:
        raise DimensionTooLarge(
            f"shorter side {width} exceeds profile width bound {MAX_PROFILE_WIDTH}"
        )

    states: dict[int, int] = {0: 1}
    for c in range(cols):
        for r in range(width):
            bit = 1 << r
            here_blocked = (c, r) in blocked
            right_ok = c + 1 < cols and (c + 1, r) not in blocked
            up_ok = r + 1 < width and (c, r + 1) not in blocked
            nxt: dict[int, int] = defaultdict(int)
            for mask, ways in states.items():
                if here_blocked:
                    if not mask & bit:
                        nxt[mask] += ways
                elif mask & bit:
                    nxt[mask & ~bit] += ways
                else:
                    if right_ok:
                        nxt[mask | bit] += ways
                    if up_ok and not mask & (bit << 1):
                        nxt[mask | (bit << 1)] += ways
            states = nxt
    return states.get(0, 0)


def iter_matchings(grid, monomers: Iterable[Site] = ()) -> Iterator[Matching]:
    """Yield every perfect matching in lexicographic order of sorted edge lists.

    The smallest uncovered site is always matched first, to its upper then
    its right neighbour, which makes the DFS order lexicographic.
    """
    grid = _as_grid(grid)
    removed = _check_monomers(grid, monomers)
    order = [s for s in grid.sites() if s not in removed]
    if len(order) % 2:
        return
    if not order:
        yield ()
        return
    index = {s: i for i, s in enumerate(order)}
    covered = [False] * len(order)

    def partners(v: Site) -> list[int]:
        m, n = v
        out = []
        for w in ((m, n + 1), (m + 1, n)):
            if w in index:
                out.append(index[w])
        return out

    def first_uncovered(start: int) -> int | None:
        for i in range(start, len(order)):
            if not covered[i]:
                return i
        return None

    edges: list[Edge] = []
    # frame: [vertex index, candidate partner indices, next candidate, current partner]
    frames = [[0, partners(order[0]), 0, None]]
    while frames:
        frame = frames[-1]
        v, cands, pos, current = frame
        if current is not None:
            covered[v] = covered[current] = False
            edges.pop()
            frame[3] = None
        while pos < len(cands) and covered[cands[pos]]:
            pos += 1
        if pos == len(cands):
            frames.pop()
            continue
        w = cands[pos]
        frame[2] = pos + 1
        frame[3] = w
        covered[v] = covered[w] = True
        edges.append((order[v], order[w]))
        nv = first_uncovered(v + 1)
        if nv is None:
            yield tuple(edges)
        else:
            frames.append([nv, partners(order[nv]), 0, None])


def enumerate_matchings(
    grid, monomers: Iterable[Site] = (), cap: int = DEFAULT_ENUMERATION_CAP
) -> list[Matching]:
    grid = _as_grid(grid)
    monomers = list(monomers)
    total = count_matchings(grid, monomers)
    if total > cap:
        raise EnumerationCapExceeded(
            f"{total} matchings on {grid.M}x{grid.N} minus {monomers} exceeds cap {cap}"
        )
    return list(iter_matchings(grid, monomers))


def serialize_matching(matching: Matching) -> list[list[list[int]]]:
    """JSON-friendly form: sorted list of ``[[m, n], [m', n']]`` pairs."""
    return [[list(a), list(b)] for a, b in sorted(matching)]


@dataclass(frozen=True)
class DoubleDimerConfig:
    grid: GridSpec
    matchA: Matching
    matchB: Matching
    monomersA: tuple[Site, Site]
    monomersB: tuple[Site, Site]


@dataclass(frozen=True)
class Classification:
    type: str  # "I" or "II"
    loops: int


def _partner_map(grid: GridSpec, matching: Sequence[Edge], holes, label: str) -> dict[Site, Site]:
    partner: dict[Site, Site] = {}
    for a, b in matching:
        if not (grid.contains(a) and grid.contains(b)):
            raise MalformedSuperposition(f"edge {a}-{b} of {label} leaves the grid")
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise MalformedSuperposition(f"edge {a}-{b} of {label} is not nearest-neighbour")
        for s in (a, b):
            if s in partner or s in holes:
                raise MalformedSuperposition(f"site {s} covered twice or is a monomer in {label}")
        partner[a] = b
        partner[b] = a
    expected = grid.M * grid.N - len(holes)
    if len(partner) != expected:
        raise MalformedSuperposition(
            f"{label} covers {len(partner)} sites, expected {expected}"
        )
    return partner


def _classify_maps(grid: GridSpec, pa: dict, pb: dict, monomersA, monomersB) -> Classification:
    bl, br, tl, tr = grid.corners
    start = monomersA[0]
    # start has no A-dimer, so the path leaves on its B-dimer
    on_path = {start}
    v, use_a = start, False
    while True:
        nxt = (pa if use_a else pb).get(v)
        if nxt is None:
            break
        v = nxt
        on_path.add(v)
        use_a = not use_a
    end = v
    if end == start or end not in set(monomersA) | set(monomersB):
        raise MalformedSuperposition(f"path from {start} ended at {end}")
    pair = frozenset((start, end))
    if pair in (frozenset((bl, tl)), frozenset((br, tr))):
        kind = "I"
    elif pair in (frozenset((bl, br)), frozenset((tl, tr))):
        kind = "II"
    else:
        raise MalformedSuperposition(f"non-planar pairing {start}-{end}")

    other = next(s for s in (*monomersA, *monomersB) if s not in on_path)
    v, use_a = other, other in set(monomersB)
    on_path.add(v)
    while True:
        nxt = (pa if use_a else pb).get(v)
        if nxt is None:
            break
        v = nxt
        on_path.add(v)
        use_a = not use_a
    if len(on_path & (set(monomersA) | set(monomersB))) != 4:
        raise MalformedSuperposition("second path does not join the remaining monomers")

    loops = 0
    seen = set(on_path)
    for s in pa:
        if s in seen:
            continue
        if pa[s] == pb.get(s):
            seen.add(s)
            seen.add(pa[s])
            continue
        loops += 1
        v, use_a = s, True
        while True:
            seen.add(v)
            v = (pa if use_a else pb)[v]
            use_a = not use_a
            if v == s:
                break
    return Classification(kind, loops)


def classify(config: DoubleDimerConfig) -> Classification:
    """Type of a four-monomer double-dimer configuration and its loop count.

    Type ``"I"`` joins the two left corners and the two right corners (the
    vertically inline monomers); type ``"II"`` joins the bottom pair and the
    top pair.  Doubled edges are not loops.
    """
    grid = config.grid
    a_holes, b_holes = set(config.monomersA), set(config.monomersB)
    if len(a_holes) != 2 or len(b_holes) != 2 or a_holes & b_holes:
        raise MalformedSuperposition("need two disjoint pairs of monomers")
    pa = _partner_map(grid, config.matchA, a_holes, "matchA")
    pb = _partner_map(grid, config.matchB, b_holes, "matchB")
    return _classify_maps(grid, pa, pb, tuple(config.monomersA), tuple(config.monomersB))


@dataclass
class ConnectivityReport:
    M: int
    N: int
    q0: int
    n_total: int
    n_typeI: int
    n_typeII: int
    loop_histogram: dict[int, int]
    n_superpositions: int
    z_dd_weighted: Fraction
    P: Fraction
    P_unweighted: Fraction
    Z: Fraction = field(init=False)
    Z_I: Fraction = field(init=False)

    def __post_init__(self):
        self.Z = Fraction(self.n_total, self.q0**2)
        self.Z_I = Fraction(self.n_typeI, self.q0**2)

    def as_dict(self) -> dict:
        return {
            "M": self.M,
            "N": self.N,
            "q0": self.q0,
            "n_total": self.n_total,
            "n_typeI": self.n_typeI,
            "n_typeII": self.n_typeII,
            "loop_histogram": {str(k): v for k, v in sorted(self.loop_histogram.items())},
            "n_superpositions": self.n_superpositions,
            "Z": str(self.Z),
            "Z_I": str(self.Z_I),
            "z_dd_weighted": str(self.z_dd_weighted),
            "P": str(self.P),
            "P_unweighted": str(self.P_unweighted),
        }


def exhaustive_hookup(grid, cap: int = DEFAULT_ENUMERATION_CAP) -> ConnectivityReport:
    """Classify every double-dimer configuration with wired corner monomers.

    Dimer model A misses the bottom corners, model B the top corners.  Each
    (A, B) pair is one configuration; a superposition with ``l`` loops is hit
    by exactly ``2**l`` pairs, which is checked along the way.  Closing the
    paths through the wired arcs adds two loops to a type I configuration and
    one to a type II configuration.
    """
    grid = _as_grid(grid)
    grid.require_hookup_shape()
    bl, br, tl, tr = grid.corners
    monomersA, monomersB = (bl, br), (tl, tr)
    side_a = enumerate_matchings(grid, monomersA, cap)
    side_b = enumerate_matchings(grid, monomersB, cap)

    edge_index = {}
    for s in grid.sites():
        m, n = s
        for w in ((m, n + 1), (m + 1, n)):
            if grid.contains(w):
                edge_index[(s, w)] = len(edge_index)

    def prepare(matchings, holes, label):
        out = []
        for mt in matchings:
            bits = 0
            for e in mt:
                bits |= 1 << edge_index[e]
            out.append((_partner_map(grid, mt, set(holes), label), bits))
        return out

    prep_a = prepare(side_a, monomersA, "matchA")
    prep_b = prepare(side_b, monomersB, "matchB")

    n_I = n_II = 0
    histogram: dict[int, int] = defaultdict(int)
    groups: dict[tuple[int, int], list] = {}
    for pa, bits_a in prep_a:
        for pb, bits_b in prep_b:
            c = _classify_maps(grid, pa, pb, monomersA, monomersB)
            if c.type == "I":
                n_I += 1
            else:
                n_II += 1
            histogram[c.loops] += 1
            key = (bits_a | bits_b, bits_a & bits_b)
            g = groups.get(key)
            if g is None:
                groups[key] = [c, 1]
            else:
                if g[0] != c:
                    raise AssertionError(f"superposition {key} classified inconsistently")
                g[1] += 1

    z_dd_from_superpositions = 0
    for c, multiplicity in groups.values():
        if multiplicity != 2**c.loops:
            raise AssertionError(
                f"superposition with {c.loops} loops realised by {multiplicity} pairs"
            )
        z_dd_from_superpositions += 2 ** (c.loops + (2 if c.type == "I" else 1))

    n_total = n_I + n_II
    z_dd_pairs = 4 * n_I + 2 * n_II
    if z_dd_pairs != z_dd_from_superpositions:
        raise AssertionError("pair and superposition weightings disagree")
    P = Fraction(n_total - n_I, n_total + n_I)
    if Fraction(2 * n_II, z_dd_pairs) != P:
        raise AssertionError("weighted type II fraction differs from (Z - Z_I)/(Z + Z_I)")

    q0 = count_matchings(grid)
    return ConnectivityReport(
        M=grid.M,
        N=grid.N,
        q0=q0,
        n_total=n_total,
        n_typeI=n_I,
        n_typeII=n_II,
        loop_histogram=dict(sorted(histogram.items())),
        n_superpositions=len(groups),
        z_dd_weighted=Fraction(z_dd_pairs, q0**2),
        P=P,
        P_unweighted=Fraction(n_II, n_total),
    )
