"""Finitely presented groups over free targets: integer linear algebra.

Relator matrices, Smith normal form with tracked unimodular transforms,
abelianization invariants, the primitive-image criterion for retractions
onto cyclic subgroups, and verification of retractions built from
solutions of the big test-word equation.

All arithmetic is arbitrary-precision integer; matrices are plain lists
of lists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .words import Alphabet, Word, WordError, format_word, parse_word, substitute

Matrix = list[list[int]]


@dataclass(frozen=True)
class Presentation:
    num_gens: int
    relators: tuple[Word, ...]

    def __post_init__(self) -> None:
        if self.num_gens < 1:
            raise WordError("need at least one generator")
        for r in self.relators:
            if r.alphabet.rank != self.num_gens:
                raise WordError("relator alphabet does not match generator count")

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.num_gens)


def parse_presentation(text: str) -> Presentation:
    """File format: a line ``gens: <n>`` then one relator literal per line."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("gens:"):
        raise WordError("presentation must start with 'gens: <n>'")
    num = int(lines[0].split(":", 1)[1])
    alph = Alphabet(num)
    relators = tuple(parse_word(ln, alph) for ln in lines[1:])
    return Presentation(num, relators)


def relator_matrix(pres: Presentation) -> Matrix:
    """Row i, column j holds the exponent sum of relator i on generator j."""
    return [[r.exponent_sum(j) for j in range(pres.num_gens)] for r in pres.relators]


def identity_matrix(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise WordError("matrix shape mismatch")
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)] for row in a]


def determinant(m: Matrix) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SNFResult:
    """U M V = D with U, V unimodular and D diagonal, d1 | d2 | ..."""

    d: Matrix
    u: Matrix
    v: Matrix

    def diagonal(self) -> list[int]:
        return [self.d[i][i] for i in range(min(len(self.d), len(self.d[0]) if self.d else 0))]

    def to_json_dict(self) -> dict:
        return {"d": self.d, "u": self.u, "v": self.v, "diagonal": self.diagonal()}


def smith_normal_form(m: Matrix, cols: Optional[int] = None) -> SNFResult:
    """Diagonalize by elementary row and column operations.

    Pivot choice: smallest nonzero absolute value in the working block,
    ties broken topmost then leftmost.  Row operations accumulate in U,
    column operations in V, so U M V = D exactly.  ``cols`` pins the
    column count for matrices with no rows.
    """
    rows = len(m)
    if cols is None:
        cols = len(m[0]) if rows else 0
    for row in m:
        if len(row) != cols:
            raise WordError("matrix is ragged")
    d = [row[:] for row in m]
    u = identity_matrix(rows)
    v = identity_matrix(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, factor):
        d[dst] = [x + factor * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + factor * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, factor):
        for row in d:
            row[dst] += factor * row[src]
        for row in v:
            row[dst] += factor * row[src]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    limit = min(rows, cols)
    for k in range(limit):
        while True:
            pivot = None
            for i in range(k, rows):
                for j in range(k, cols):
                    if d[i][j] != 0 and (pivot is None or abs(d[i][j]) < abs(d[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            if pivot != (k, k):
                if pivot[0] != k:
                    swap_rows(k, pivot[0])
                if pivot[1] != k:
                    swap_cols(k, pivot[1])
            reduced = True
            for i in range(k + 1, rows):
                if d[i][k]:
                    add_row(i, k, -(d[i][k] // d[k][k]))
                    if d[i][k]:
                        reduced = False
            for j in range(k + 1, cols):
                if d[k][j]:
                    add_col(j, k, -(d[k][j] // d[k][k]))
                    if d[k][j]:
                        reduced = False
            if not reduced:
                continue
            if any(d[i][k] for i in range(k + 1, rows)) or any(d[k][j] for j in range(k + 1, cols)):
                continue
            # divisibility: pull any non-divisible entry into row k
            culprit = None
            for i in range(k + 1, rows):
                for j in range(k + 1, cols):
                    if d[i][j] % d[k][k]:
                        culprit = i
                        break
                if culprit is not None:
                    break
            if culprit is None:
                break
            add_row(k, culprit, 1)
        if d[k][k] < 0:
            negate_row(k)
    return SNFResult(d, u, v)


@dataclass(frozen=True)
class AbelianizationData:
    invariant_factors: tuple[int, ...]  # entries > 1, divisibility chain
    free_rank: int

    def to_json_dict(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors), "free_rank": self.free_rank}


def abelianization(pres: Presentation) -> AbelianizationData:
    """Invariant factors and free rank of the abelianized group."""
    snf = smith_normal_form(relator_matrix(pres), cols=pres.num_gens)
    diag = snf.diagonal()
    nonzero = [x for x in diag if x != 0]
    return AbelianizationData(
        invariant_factors=tuple(x for x in nonzero if x > 1),
        free_rank=pres.num_gens - len(nonzero),
    )


def _extended_gcd_vector(values: Sequence[int]) -> tuple[int, list[int]]:
    """gcd plus Bezout coefficients for a vector of integers."""
    g = 0
    coeffs = [0] * len(values)
    for i, val in enumerate(values):
        if val == 0:
            continue
        if g == 0:
            g = abs(val)
            coeffs = [0] * len(values)
            coeffs[i] = 1 if val > 0 else -1
            continue
        old_g = g
        g = math.gcd(g, val)
        # g = x * old_g + y * val
        x, y = _xgcd(old_g, val)
        coeffs = [c * x for c in coeffs]
        coeffs[i] += y
    return g, coeffs


def _xgcd(a: int, b: int) -> tuple[int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_s, old_t


@dataclass(frozen=True)
class CyclicRetractResult:
    primitive: bool
    gcd: int
    free_image: tuple[int, ...]
    covector: Optional[tuple[int, ...]]

    def to_json_dict(self) -> dict:
        return {
            "primitive": self.primitive,
            "gcd": self.gcd,
            "free_image": list(self.free_image),
            "covector": list(self.covector) if self.covector else None,
        }


def cyclic_retract_test(pres: Presentation, h: Word) -> CyclicRetractResult:
    """Primitive-image criterion for a retraction onto <h>.

    Computes the image of h in the free part of the abelianization; when
    the coordinate gcd is 1 an integer covector lambda with
    lambda(image(h)) = 1 exists and g -> h^{lambda(ab(g))} is a
    retraction of the presented group onto <h>.
    """
    if h.is_identity():
        raise WordError("h must be nonidentity")
    if h.alphabet.rank != pres.num_gens:
        raise WordError("h must be a word in the presentation generators")
    m = relator_matrix(pres)
    snf = smith_normal_form(m, cols=pres.num_gens)
    diag = snf.diagonal()
    rows = len(m)
    free_cols = [
        j for j in range(pres.num_gens)
        if j >= min(rows, pres.num_gens) or (j < len(diag) and diag[j] == 0)
    ]
    e = [h.exponent_sum(j) for j in range(pres.num_gens)]
    # coordinates of h in the changed basis: e . V
    coords = [sum(e[i] * snf.v[i][j] for i in range(pres.num_gens)) for j in range(pres.num_gens)]
    free_image = tuple(coords[j] for j in free_cols)
    g, bezout = _extended_gcd_vector(free_image)
    if g != 1:
        return CyclicRetractResult(False, g, free_image, None)
    covector = tuple(
        sum(bezout[i] * snf.v[row][col] for i, col in enumerate(free_cols))
        for row in range(pres.num_gens)
    )
    assert sum(c * x for c, x in zip(covector, e)) == 1
    for relator_row in m:
        assert sum(c * x for c, x in zip(covector, relator_row)) == 0
    return CyclicRetractResult(True, 1, free_image, covector)


def retraction_images_from_covector(pres: Presentation, h: Word, covector: Sequence[int]) -> list[Word]:
    """Generator images of the retraction g_j -> h^{lambda_j}."""
    return [h ** covector[j] for j in range(pres.num_gens)]


# -- retractions from solutions -------------------------------------------------


class RetractionConditionError(WordError):
    """A required condition fails; carries which one and the index."""

    def __init__(self, condition: str, index: int, detail: str):
        super().__init__(f"{condition} condition fails at index {index}: {detail}")
        self.condition = condition
        self.index = index


def verify_retraction(pres: Presentation, subgroup_words: Sequence[Word], images: Sequence[Word]) -> bool:
    """True iff the assignment kills every relator and fixes the subgroup.

    The target free group shares the presentation's alphabet; subgroup
    generators are given as words and must map to themselves literally.
    """
    if len(images) != pres.num_gens:
        raise WordError(f"need {pres.num_gens} generator images, got {len(images)}")
    for r in pres.relators:
        if not substitute(r, images).is_identity():
            return False
    for v in subgroup_words:
        if substitute(v, images) != v:
            return False
    return True


@dataclass(frozen=True)
class RetractionResult:
    images: tuple[Word, ...]
    verified: bool

    def to_json_dict(self) -> dict:
        return {"images": [format_word(w) for w in self.images], "verified": self.verified}


def retraction_from_solution(
    pres: Presentation,
    subgroup_words: Sequence[Word],
    relator_words: Sequence[Word],
    solution: Sequence[Word],
    common_value: Word,
    alpha: int,
) -> RetractionResult:
    """Build the conjugation-corrected retraction from an equation solution.

    Preconditions, checked in order and reported with the offending index:
    every relator word must evaluate to the identity on the solution, and
    every subgroup word must evaluate to its own conjugate by the alpha-th
    power of the common value.  The corrected assignment conjugates the
    solution back, which restores the subgroup pointwise.
    """
    if len(solution) != pres.num_gens:
        raise WordError(f"need {pres.num_gens} solution words, got {len(solution)}")
    for j, u_word in enumerate(relator_words):
        if not substitute(u_word, solution).is_identity():
            raise RetractionConditionError("relator-kill", j, f"{format_word(u_word)} does not die")
    shift = common_value ** alpha
    for i, v_word in enumerate(subgroup_words):
        expected = v_word.conjugate(shift)
        if substitute(v_word, solution) != expected:
            raise RetractionConditionError(
                "subgroup-fixation", i, f"{format_word(v_word)} is not conjugated by the expected power"
            )
    back = common_value ** (-alpha)
    corrected = tuple(s.conjugate(back) for s in solution)
    verified = verify_retraction(pres, list(subgroup_words), list(corrected))
    return RetractionResult(corrected, verified)
