"""Finite-sample hyperbolic geometry over free-group Cayley balls.

Balls are built breadth-first over an arbitrary finite generating set,
with the word metric computed exactly inside a window of twice the
radius.  The validators (thin triangles, midpoints, quasi-geodesic
concatenation) measure quantities on finite data; a delta estimate is a
lower bound for the ambient space, never a certification.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .words import Alphabet, Word, WordError, format_word
from .oracles import is_commensurable


class BallCapExceeded(RuntimeError):
    pass


class GeodesicOracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Finitely many points with an exact integer metric."""

    points: tuple[Word, ...]
    dist_matrix: tuple[tuple[int, ...], ...]
    index: dict = field(repr=False, hash=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.points)
        object.__setattr__(self, "index", {pt: i for i, pt in enumerate(self.points)})
        for i in range(n):
            if self.dist_matrix[i][i] != 0:
                raise WordError("nonzero self-distance")
            for j in range(n):
                if self.dist_matrix[i][j] != self.dist_matrix[j][i]:
                    raise WordError("metric not symmetric")

    def __len__(self) -> int:
        return len(self.points)

    def dist(self, u: Word, v: Word) -> int:
        try:
            return self.dist_matrix[self.index[u]][self.index[v]]
        except KeyError as missing:
            raise WordError(f"point {missing.args[0]} not in space") from None

    def check_triangle_inequality(self, samples: int, seed: int = 0) -> bool:
        rng = random.Random(seed)
        n = len(self.points)
        for _ in range(samples):
            i, j, k = (rng.randrange(n) for _ in range(3))
            if self.dist_matrix[i][k] > self.dist_matrix[i][j] + self.dist_matrix[j][k]:
                return False
        return True


def cayley_ball(gens: Sequence[Word], radius: int, cap: int = 200_000) -> FiniteMetricSpace:
    """Ball of the word metric over ``gens`` in the free group.

    Points are group elements (reduced words) within distance ``radius``
    of the identity; distances come from a breadth-first search out to
    2 * radius, which covers every pair inside the ball.
    """
    if radius < 0:
        raise WordError("radius must be >= 0")
    if not gens:
        raise WordError("need at least one generator")
    alph = gens[0].alphabet
    moves = []
    for g in gens:
        if g.alphabet != alph:
            raise WordError("generators use mixed alphabets")
        moves.append(g)
        moves.append(g.inverse())

    distances = {alph.identity(): 0}
    frontier = [alph.identity()]
    for step in range(1, 2 * radius + 1):
        nxt = []
        for word in frontier:
            for mv in moves:
                img = word * mv
                if img not in distances:
                    distances[img] = step
                    nxt.append(img)
                    if len(distances) > cap:
                        raise BallCapExceeded(f"ball exceeds cap of {cap} elements")
        frontier = nxt
    points = tuple(sorted((w for w, d in distances.items() if d <= radius), key=lambda w: (distances[w], _lex(w))))
    matrix = tuple(
        tuple(distances[u.inverse() * v] for v in points)
        for u in points
    )
    return FiniteMetricSpace(points, matrix)


def _lex(word: Word) -> tuple:
    return tuple(2 * (abs(l) - 1) + (l < 0) for l in word.letters())


def gromov_product(sp: FiniteMetricSpace, a: Word, b: Word, c: Word) -> Fraction:
    """(a, b)_c = (d(c,a) + d(c,b) - d(a,b)) / 2, exactly."""
    return Fraction(sp.dist(c, a) + sp.dist(c, b) - sp.dist(a, b), 2)


def free_tree_geodesic(u: Word, v: Word) -> list[Word]:
    """The unique geodesic between u and v over the standard basis."""
    path = [u]
    for letter in (u.inverse() * v).letters():
        step = Word.from_syllables(u.alphabet, [(abs(letter) - 1, 1 if letter > 0 else -1)])
        path.append(path[-1] * step)
    return path


GeodesicOracle = Callable[[Word, Word], Sequence[Word]]


def _validated_geodesic(sp: FiniteMetricSpace, oracle: GeodesicOracle, a: Word, b: Word) -> list[Word]:
    path = list(oracle(a, b))
    if not path or path[0] != a or path[-1] != b:
        raise GeodesicOracleError("oracle path has wrong endpoints")
    total = sum(sp.dist(path[i], path[i + 1]) for i in range(len(path) - 1))
    if total != sp.dist(a, b):
        raise GeodesicOracleError("oracle path is not geodesic")
    return path


@dataclass(frozen=True)
class DeltaReport:
    lower_bound: Fraction
    witness_triangle: Optional[tuple[Word, Word, Word]]
    samples: int

    def to_json_dict(self) -> dict:
        return {
            "delta_lower_bound": str(self.lower_bound),
            "witness_triangle": [format_word(w) for w in self.witness_triangle]
            if self.witness_triangle
            else None,
            "samples": self.samples,
        }


def delta_thin_report(
    sp: FiniteMetricSpace,
    geodesic_oracle: GeodesicOracle,
    samples: int,
    seed: int = 0,
) -> DeltaReport:
    """Max deviation of matched points on two triangle sides, with the
    witnessing triangle.

    Samples triangles (A, B, C); on the sides [C,A] and [C,B] every pair
    of vertices at equal distance from C, up to the Gromov product
    (A,B)_C, contributes its distance.  The maximum is a lower bound for
    the thinness constant of the ambient space.
    """
    rng = random.Random(seed)
    n = len(sp.points)
    if n < 3:
        return DeltaReport(Fraction(0), None, samples)
    best = Fraction(0)
    witness = None
    for _ in range(samples):
        a, b, c = (sp.points[rng.randrange(n)] for _ in range(3))
        product = gromov_product(sp, a, b, c)
        side_a = _validated_geodesic(sp, geodesic_oracle, c, a)
        side_b = _validated_geodesic(sp, geodesic_oracle, c, b)
        for pa in side_a:
            da = sp.dist(c, pa)
            if da > product:
                continue
            for pb in side_b:
                if sp.dist(c, pb) == da:
                    gap = Fraction(sp.dist(pa, pb))
                    if gap > best:
                        best = gap
                        witness = (a, b, c)
    return DeltaReport(best, witness, samples)


def estimate_delta_thin(
    sp: FiniteMetricSpace,
    geodesic_oracle: GeodesicOracle,
    samples: int,
    seed: int = 0,
) -> Fraction:
    """Lower bound for the thinness constant; see delta_thin_report."""
    return delta_thin_report(sp, geodesic_oracle, samples, seed).lower_bound


@dataclass(frozen=True)
class QGConstants:
    kappa: Fraction
    epsilon: Fraction

    def __post_init__(self) -> None:
        if self.kappa < 1 or self.epsilon < 0:
            raise WordError("need kappa >= 1 and epsilon >= 0")


@dataclass(frozen=True)
class PathSample:
    """A vertex path with its step lengths under an ambient metric."""

    vertices: tuple[Word, ...]
    steps: tuple[int, ...]
    dist: Callable[[Word, Word], int] = field(compare=False)

    @staticmethod
    def from_vertices(vertices: Sequence[Word], dist: Optional[Callable[[Word, Word], int]] = None) -> "PathSample":
        if not vertices:
            raise WordError("path needs at least one vertex")
        if dist is None:
            dist = free_word_metric
        steps = tuple(dist(vertices[i], vertices[i + 1]) for i in range(len(vertices) - 1))
        return PathSample(tuple(vertices), steps, dist)

    def length(self) -> int:
        return sum(self.steps)

    @property
    def start(self) -> Word:
        return self.vertices[0]

    @property
    def end(self) -> Word:
        return self.vertices[-1]


def free_word_metric(u: Word, v: Word) -> int:
    return len(u.inverse() * v)


@dataclass(frozen=True)
class QuasigeodesicVerdict:
    ok: bool
    worst_start: int
    worst_end: int
    worst_slack: Fraction

    def __bool__(self) -> bool:
        return self.ok


def is_quasigeodesic(path: PathSample, c: QGConstants) -> QuasigeodesicVerdict:
    """Check d(ends) >= length/kappa - epsilon on every contiguous subpath.

    Returns the subpath minimizing the slack; on failure that is the
    witnessing violation.
    """
    n = len(path.vertices)
    prefix = [0]
    for s in path.steps:
        prefix.append(prefix[-1] + s)
    worst = (Fraction(0), 0, 0)
    found = False
    for i in range(n):
        for j in range(i + 1, n):
            sub_len = prefix[j] - prefix[i]
            slack = Fraction(path.dist(path.vertices[i], path.vertices[j])) - (
                Fraction(sub_len) / c.kappa - c.epsilon
            )
            if not found or slack < worst[0]:
                worst = (slack, i, j)
                found = True
    if not found:
        return QuasigeodesicVerdict(True, 0, 0, Fraction(0))
    return QuasigeodesicVerdict(worst[0] >= 0, worst[1], worst[2], worst[0])


def check_midpoint_inequality(
    sp: FiniteMetricSpace,
    a: Word,
    b: Word,
    c: Word,
    geo_ac: Sequence[Word],
    geo_bc: Sequence[Word],
    delta: Fraction,
) -> bool:
    """d(mid[A,C], mid[B,C]) <= d(A,B) + 2 delta.

    The midpoint of a geodesic with k edges is the vertex at index
    floor(k/2) counted from the first-named endpoint.
    """
    path_a = _validated_geodesic(sp, lambda *_: geo_ac, a, c)
    path_b = _validated_geodesic(sp, lambda *_: geo_bc, b, c)
    mid_a = path_a[(len(path_a) - 1) // 2]
    mid_b = path_b[(len(path_b) - 1) // 2]
    return Fraction(sp.dist(mid_a, mid_b)) <= Fraction(sp.dist(a, b)) + 2 * delta


@dataclass(frozen=True)
class ConcatenationReport:
    hypotheses_ok: bool
    product_hypothesis_ok: bool
    length_hypothesis_ok: bool
    measured_epsilon0: Fraction

    def to_json_dict(self) -> dict:
        return {
            "hypotheses_ok": self.hypotheses_ok,
            "product_hypothesis_ok": self.product_hypothesis_ok,
            "length_hypothesis_ok": self.length_hypothesis_ok,
            "measured_epsilon0": str(self.measured_epsilon0),
        }


def check_concatenation_quasigeodesic(
    paths: Sequence[PathSample],
    delta: Fraction,
    c: QGConstants,
    alpha: Fraction,
) -> ConcatenationReport:
    """Evaluate the chaining hypotheses and measure the actual constant.

    Hypotheses on a chain q_0 .. q_{m+1}: each joint has Gromov product
    below alpha, and every interior piece has endpoint distance at least
    2 alpha + 2 m^2 delta.  The measured epsilon is the smallest value
    making the whole concatenation a (kappa, epsilon)-quasi-geodesic.
    """
    if len(paths) < 2:
        raise WordError("need at least two paths")
    for left, right in zip(paths, paths[1:]):
        if left.end != right.start:
            raise WordError("consecutive paths do not share endpoints")
    dist = paths[0].dist
    m = len(paths) - 2
    product_ok = True
    for i in range(len(paths) - 1):
        p, q = paths[i], paths[i + 1]
        product = Fraction(dist(p.end, p.start) + dist(p.end, q.end) - dist(p.start, q.end), 2)
        if product >= alpha:
            product_ok = False
    length_ok = all(
        Fraction(dist(paths[i].start, paths[i].end)) >= 2 * alpha + 2 * m * m * delta
        for i in range(1, len(paths) - 1)
    )
    vertices = list(paths[0].vertices)
    for piece in paths[1:]:
        vertices.extend(piece.vertices[1:])
    joined = PathSample.from_vertices(vertices, dist)
    measured = Fraction(0)
    n = len(joined.vertices)
    prefix = [0]
    for s in joined.steps:
        prefix.append(prefix[-1] + s)
    for i in range(n):
        for j in range(i + 1, n):
            need = Fraction(prefix[j] - prefix[i]) / c.kappa - Fraction(dist(joined.vertices[i], joined.vertices[j]))
            if need > measured:
                measured = need
    return ConcatenationReport(product_ok and length_ok, product_ok, length_ok, measured)


@dataclass(frozen=True)
class DivergenceReport:
    c: Word
    d: Word
    rows: tuple[tuple[int, int, int], ...]  # (n, m, |c^n d^m|)
    observed_ratio_bound: Fraction  # max of min(n,m) / |c^n d^m|
    power_growth_ok: bool  # |c^n| >= n for cyclically reduced c (and d)

    def to_json_dict(self) -> dict:
        return {
            "c": format_word(self.c),
            "d": format_word(self.d),
            "rows": [list(r) for r in self.rows],
            "observed_ratio_bound": str(self.observed_ratio_bound),
            "power_growth_ok": self.power_growth_ok,
        }

    def to_csv(self) -> str:
        lines = ["n,m,length,ratio"]
        for n, m, length in self.rows:
            lines.append(f"{n},{m},{length},{Fraction(min(n, m), length)}")
        return "\n".join(lines) + "\n"


def divergence_experiment(c: Word, d: Word, n_max: int, m_max: int) -> DivergenceReport:
    """Exact lengths |c^n d^m| over the standard basis, with the observed
    lower bound for the divergence constant.

    Requires c and d non-commensurable, which also rules out c^n d^m = 1.
    Inside the table the tree fact |w^n| >= n for cyclically reduced w is
    asserted for both inputs.
    """
    if c.is_identity() or d.is_identity():
        raise WordError("divergence needs nonidentity elements")
    if is_commensurable(c, d) is not None:
        raise WordError("inputs are commensurable; divergence undefined")
    if n_max < 1 or m_max < 1:
        raise WordError("ranges must be >= 1")
    growth_ok = True
    c_pows = [c.alphabet.identity()]
    for n in range(1, n_max + 1):
        c_pows.append(c_pows[-1] * c)
        if c.is_cyclically_reduced() and len(c_pows[-1]) < n:
            growth_ok = False
    d_pows = [d.alphabet.identity()]
    for m in range(1, m_max + 1):
        d_pows.append(d_pows[-1] * d)
        if d.is_cyclically_reduced() and len(d_pows[-1]) < m:
            growth_ok = False
    rows = []
    best = Fraction(0)
    for n in range(1, n_max + 1):
        for m in range(1, m_max + 1):
            length = len(c_pows[n] * d_pows[m])
            rows.append((n, m, length))
            ratio = Fraction(min(n, m), length)
            if ratio > best:
                best = ratio
    return DivergenceReport(c, d, tuple(rows), best, growth_ok)


def minimal_conjugation_split(w: Word, bound: int) -> tuple[Word, Word]:
    """Shortest x with w = x^{-1} y x and |y| <= bound.

    Candidates come from trimming the cyclic-reduction conjugator letter
    by letter; each trimmed letter shortens x by one and lengthens y by
    two, exactly (the assembled word is reduced as written).
    """
    core, conj = w.cyclic_reduce()
    if bound < len(core):
        raise WordError(f"bound {bound} below cyclic core length {len(core)}")
    # w = conj * core * conj^{-1}; with x = conj^{-1} (k letters) the
    # split j keeps the last j letters of x: |y_j| = |core| + 2(k - j)
    k = len(conj)
    slack = (bound - len(core)) // 2
    j = max(0, k - slack)
    conj_letters = list(conj.letters())
    prefix = Word.from_syllables(
        w.alphabet, [(abs(l) - 1, 1 if l > 0 else -1) for l in conj_letters[:j]]
    )
    x = prefix.inverse()
    y = prefix.inverse() * w * prefix  # w = x^{-1} y x with x = prefix^{-1}
    assert x.inverse() * y * x == w
    assert len(y) <= bound
    return y, x
