"""Weight supports of C[L, R]-modules (SL2) and K-type supports with walls (Sp2).

SL2 supports are sets of even weights seen through a finite window; a flag
per side records that the set continues as a ray beyond the window.  K-type
supports are finite multisets of U(2) highest weights (a, b), a >= b, with
half-plane walls.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

SL2_KINDS = ("phi_kd", "psi", "phi_tilde", "psi_tilde", "custom")
DEFAULT_RADIUS = 24


@dataclass(frozen=True)
class Sl2Support:
    kind: str
    w_min: int
    w_max: int
    occupied: frozenset
    extends_below: bool = False
    extends_above: bool = False
    solid_wall: Optional[tuple[int, str]] = None
    dashed_wall: Optional[int] = None
    focus: Optional[int] = None

    def __post_init__(self):
        if self.kind not in SL2_KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.w_min % 2 or self.w_max % 2 or self.w_min > self.w_max:
            raise ValueError("window bounds must be even with w_min <= w_max")
        occ = frozenset(int(w) for w in self.occupied)
        if any(w % 2 for w in occ):
            raise ValueError("occupied weights must be even")
        if any(not self.w_min <= w <= self.w_max for w in occ):
            raise ValueError("occupied weight outside window")
        object.__setattr__(self, "occupied", occ)

    def contains(self, w: int) -> bool:
        """Membership in the full (possibly infinite) support."""
        if w % 2:
            return False
        if w < self.w_min:
            return self.extends_below
        if w > self.w_max:
            return self.extends_above
        return w in self.occupied

    def materialize(self, lo: int, hi: int) -> set[int]:
        return {w for w in range(lo - lo % 2, hi + 1, 2) if self.contains(w)}

    def is_empty(self) -> bool:
        return not (self.occupied or self.extends_below or self.extends_above)

    def min_weight(self) -> Optional[int]:
        if self.extends_below or not self.occupied:
            return None
        return min(self.occupied)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "window": [self.w_min, self.w_max],
                "occupied": sorted(self.occupied),
                "extends_below": self.extends_below, "extends_above": self.extends_above,
                "solid_wall": None if self.solid_wall is None else list(self.solid_wall),
                "dashed_wall": self.dashed_wall, "focus": self.focus}


def _window(center: int, radius: int) -> tuple[int, int]:
    c = center - center % 2
    return c - radius, c + radius


def canonical_sl2_support(kind: str, k: int, d: int = 0, radius: int = DEFAULT_RADIUS) -> Sl2Support:
    """The weight support generated by one of the four elliptic Fourier terms."""
    if k % 2:
        raise ValueError("k must be even")
    if radius < 0 or radius % 2:
        raise ValueError("radius must be a nonnegative even integer")
    w_min, w_max = _window(k, radius)
    if kind == "phi_kd":
        if d < 0:
            raise ValueError("phi_kd needs d >= 0")
        lo = k - 2 * d
        w_min = min(w_min, lo - 2)
        occ = range(lo, w_max + 1, 2)
        return Sl2Support(kind, w_min, w_max, frozenset(occ), False, True, (lo, "right"), 2 * d - k, k)
    if d:
        raise ValueError(f"{kind} takes no depth parameter")
    if kind == "psi":
        if k < 0:
            raise ValueError("psi needs k >= 0")
        lo = -k
        w_min = min(w_min, lo - 2)
        occ = range(lo, w_max + 1, 2)
        return Sl2Support(kind, w_min, w_max, frozenset(occ), False, True, (k + 2, "right"), -k - 2, k)
    if kind == "phi_tilde":
        if k >= 0:
            raise ValueError("phi_tilde needs k < 0")
        occ = range(w_min, k + 1, 2)
        return Sl2Support(kind, w_min, w_max, frozenset(occ), True, False, (k, "left"), -k, k)
    if kind == "psi_tilde":
        if k > 0:
            raise ValueError("psi_tilde needs k <= 0")
        hi = -k
        w_max = max(w_max, hi + 2)
        occ = range(w_min, hi + 1, 2)
        return Sl2Support(kind, w_min, w_max, frozenset(occ), True, False, (k - 2, "left"), -k + 2, k)
    raise ValueError(f"no canonical support for kind {kind!r}")


def point_support(w: int = 0) -> Sl2Support:
    """The singleton support {w}, e.g. a constant function at weight w."""
    return Sl2Support("custom", w, w, frozenset({w}), focus=w)


def _combine_walls(a, b):
    if a is None or b is None or a[1] != b[1]:
        return None
    return (a[0] + b[0], a[1])


def tensor_sl2(s1: Sl2Support, s2: Sl2Support, window: Optional[tuple[int, int]] = None) -> Sl2Support:
    """Support of the tensor product: the Minkowski sum of the two weight sets."""
    if window is None:
        window = (s1.w_min + s2.w_min, s1.w_max + s2.w_max)
    w_min, w_max = window
    nonempty = not s1.is_empty() and not s2.is_empty()
    below = nonempty and (s1.extends_below or s2.extends_below)
    above = nonempty and (s1.extends_above or s2.extends_above)
    if below and above and ((s1.extends_below and s2.extends_above) or (s1.extends_above and s2.extends_below)):
        occ = set(range(w_min, w_max + 1, 2))
    elif not nonempty:
        occ = set()
    else:
        # only same-direction rays remain; a bounded slab of each set suffices
        span = (s1.w_max - s1.w_min) + (s2.w_max - s2.w_min) + abs(w_min) + abs(w_max) + 4
        lo1, hi1 = s1.w_min - span, s1.w_max + span
        lo2, hi2 = s2.w_min - span, s2.w_max + span
        a, b = s1.materialize(lo1, hi1), s2.materialize(lo2, hi2)
        occ = {x + y for x in a for y in b if w_min <= x + y <= w_max}
    focus = None if s1.focus is None or s2.focus is None else s1.focus + s2.focus
    return Sl2Support("custom", w_min, w_max, frozenset(occ), below, above,
                      _combine_walls(s1.solid_wall, s2.solid_wall), None, focus)


def has_lowest_weight(s: Sl2Support) -> bool:
    """True iff the support is bounded below (vacuously for the empty support)."""
    return s.is_empty() or not s.extends_below


def render_sl2(s: Sl2Support) -> str:
    """Monospaced diagram: one cell per even weight, walls as | markers."""
    cells, labels = [], []
    for w in range(s.w_min, s.w_max + 1, 2):
        mark = "●" if w in s.occupied else "○"
        mark = f"({mark})" if w == s.focus else f" {mark} "
        wall = " "
        if s.solid_wall and s.solid_wall[0] == w:
            wall = ">" if s.solid_wall[1] == "right" else "<"
        elif s.dashed_wall == w:
            wall = ":"
        cells.append(wall + mark)
        labels.append(f"{w:>4}")
    left = "… " if s.extends_below else "  "
    right = " …" if s.extends_above else ""
    return left + "".join(cells) + right + "\n  " + "".join(labels)


# ------------------------------------------------------------------- K-types

@dataclass(frozen=True, order=True)
class KType:
    a: int
    b: int

    def __post_init__(self):
        if self.a < self.b:
            raise ValueError("K-type needs a >= b")

    @property
    def is_scalar(self) -> bool:
        return self.a == self.b

    @property
    def dim(self) -> int:
        return self.a - self.b + 1

    def to_classical(self) -> tuple[int, int]:
        """(det power, sym power) = (b, a - b)."""
        return self.b, self.a - self.b

    @classmethod
    def from_classical(cls, det_power: int, sym_power: int) -> "KType":
        if sym_power < 0:
            raise ValueError("sym power must be nonnegative")
        return cls(det_power + sym_power, det_power)


def clebsch_gordan(t1: KType, t2: KType) -> list[KType]:
    """Irreducible constituents of t1 (x) t2; the decomposition is multiplicity free."""
    r = min(t1.a - t1.b, t2.a - t2.b)
    return [KType(t1.a + t2.a - j, t1.b + t2.b + j) for j in range(r + 1)]


WALL_DIRECTIONS = ("left", "right", "up", "down")


def wall_holds(t: KType, wall: tuple[str, int]) -> bool:
    direction, x = wall
    if direction == "right":
        return t.a >= x
    if direction == "left":
        return t.a <= x
    if direction == "up":
        return t.b >= x
    if direction == "down":
        return t.b <= x
    raise ValueError(f"unknown wall direction {direction!r}")


# walls forced on a tensor product by a wall on each factor
_WALL_RULES = {
    ("right", "up"): "right",
    ("up", "right"): "right",
    ("left", "down"): "down",
    ("down", "left"): "down",
    ("up", "up"): "up",
    ("left", "left"): "left",
}


@dataclass(frozen=True)
class KTypeSupport:
    counts: tuple = ()
    walls: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        c = Counter()
        for t, n in (self.counts.items() if isinstance(self.counts, dict) else self.counts):
            if n < 0:
                raise ValueError("multiplicities must be nonnegative")
            if n:
                c[t if isinstance(t, KType) else KType(*t)] += n
        object.__setattr__(self, "counts", tuple(sorted(c.items())))
        walls = frozenset((str(d), int(x)) for d, x in self.walls)
        for w in walls:
            if w[0] not in WALL_DIRECTIONS:
                raise ValueError(f"unknown wall direction {w[0]!r}")
            for t, _ in self.counts:
                if not wall_holds(t, w):
                    raise ValueError(f"K-type {t} violates wall {w}")
        object.__setattr__(self, "walls", walls)

    @classmethod
    def of(cls, ktypes: Iterable, walls: Iterable = ()) -> "KTypeSupport":
        return cls(tuple(Counter(KType(*t) if not isinstance(t, KType) else t for t in ktypes).items()),
                   frozenset(walls))

    @property
    def occupied(self) -> frozenset:
        return frozenset(t for t, _ in self.counts)

    def multiplicity(self, t: KType) -> int:
        return dict(self.counts).get(t, 0)

    def to_dict(self) -> dict:
        return {"ktypes": [[t.a, t.b, n] for t, n in self.counts],
                "walls": sorted([d, x] for d, x in self.walls)}


def tensor_ktype_support(s1: KTypeSupport, s2: KTypeSupport) -> KTypeSupport:
    """Clebsch-Gordan closure of all pairs, with the walls the factors force."""
    c = Counter()
    for t1, n1 in s1.counts:
        for t2, n2 in s2.counts:
            for t in clebsch_gordan(t1, t2):
                c[t] += n1 * n2
    walls = set()
    for d1, x1 in s1.walls:
        for d2, x2 in s2.walls:
            out = _WALL_RULES.get((d1, d2))
            if out is not None:
                walls.add((out, x1 + x2))
    return KTypeSupport(tuple(c.items()), frozenset(walls))


def contains_scalar_ktype(s: KTypeSupport) -> bool:
    return any(t.is_scalar for t in s.occupied)


def psi_module_support(k: int, a_max: int) -> KTypeSupport:
    """K-types (k + 2a, k), 0 <= a <= a_max, of the module generated by Psi_k."""
    if a_max < 0:
        raise ValueError("a_max must be nonnegative")
    return KTypeSupport.of([(k + 2 * a, k) for a in range(a_max + 1)],
                           [("right", k), ("up", k), ("down", k)])
