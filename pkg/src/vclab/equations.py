"""The equation family x^n y^m = a^n b^m in free groups.

Structural solution families (conjugation orbit of the base solution,
Bezout powers of the right-hand side), exhaustive bounded solving with a
root-based prune, classification of solutions, and bounded perfectness
verification.  A report can only refute perfectness or fail to refute it
at a bound; no finite run certifies the unbounded statement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .words import Alphabet, Word, WordError, count_reduced, enumerate_reduced, format_word
from .oracles import is_conjugate, root, same_elementary_subgroup, elementary_generator


class BudgetExceeded(RuntimeError):
    """Raised when a search would exceed the configured candidate cap."""


@dataclass(frozen=True)
class EquationInstance:
    """Data (a, b, n, m) of x^n y^m = a^n b^m with cached right-hand side."""

    a: Word
    b: Word
    n: int
    m: int
    g: Word = field(init=False)

    def __post_init__(self) -> None:
        if self.a.is_identity() or self.b.is_identity():
            raise WordError("coefficients a, b must be nonidentity")
        if self.n < 1 or self.m < 1:
            raise WordError("exponents n, m must be positive")
        self.a._require_same_alphabet(self.b)
        object.__setattr__(self, "g", self.a ** self.n * self.b ** self.m)

    @property
    def alphabet(self) -> Alphabet:
        return self.a.alphabet


@dataclass(frozen=True)
class SolutionPair:
    x: Word
    y: Word


class Tag(enum.Enum):
    CONJUGATE_FAMILY = "CONJUGATE_FAMILY"
    GCD_FAMILY = "GCD_FAMILY"
    SWAPPED = "SWAPPED"
    COMMON_E = "COMMON_E"
    POWER_IN_E = "POWER_IN_E"
    UNCLASSIFIED = "UNCLASSIFIED"


@dataclass(frozen=True)
class Classification:
    tag: Tag
    witness: dict

    def to_json_dict(self) -> dict:
        clean = {}
        for key, value in self.witness.items():
            clean[key] = format_word(value) if isinstance(value, Word) else value
        return {"tag": self.tag.value, "witness": clean}


def is_solution(inst: EquationInstance, p: SolutionPair) -> bool:
    p.x._require_same_alphabet(inst.a)
    return p.x ** inst.n * p.y ** inst.m == inst.g


def conjugate_family(inst: EquationInstance, alpha: int) -> SolutionPair:
    """The solution (a, b) conjugated by g^alpha; solves for every alpha."""
    h = inst.g ** alpha
    return SolutionPair(inst.a.conjugate(h), inst.b.conjugate(h))


def gcd_family(inst: EquationInstance, s: int, t: int) -> SolutionPair:
    """Bezout solution (g^s, g^t), defined when n s + m t = 1."""
    if math.gcd(inst.n, inst.m) != 1:
        raise WordError(f"gcd({inst.n}, {inst.m}) != 1: no Bezout solutions")
    if inst.n * s + inst.m * t != 1:
        raise WordError(f"Bezout condition fails: {inst.n}*{s} + {inst.m}*{t} != 1")
    return SolutionPair(inst.g ** s, inst.g ** t)


def power_exponent_of(base: Word, x: Word) -> Optional[int]:
    """Return s with base^s == x, or None.  Exact via length arithmetic."""
    if x.is_identity():
        return 0
    if base.is_identity():
        return None
    core, conj = base.cyclic_reduce()
    excess = len(x) - 2 * len(conj)
    if excess <= 0 or excess % len(core):
        return None
    s = excess // len(core)
    if base ** s == x:
        return s
    if base ** (-s) == x:
        return -s
    return None


def brute_force_solutions(
    inst: EquationInstance,
    bound: int,
    max_candidates: Optional[int] = None,
    jobs: int = 1,
) -> list[SolutionPair]:
    """All solution pairs with both components of length <= bound.

    Enumerates x only: y is forced, since in a free group x^{-n} g is an
    m-th power in at most one way.  Deterministic shortlex order.
    """
    if bound < 0:
        raise WordError("bound must be >= 0")
    total = count_reduced(inst.alphabet.rank, bound)
    if max_candidates is not None and total > max_candidates:
        raise BudgetExceeded(f"{total} x-candidates exceed cap {max_candidates}")
    candidates = list(enumerate_reduced(inst.alphabet, bound))
    if jobs > 1:
        chunks = [candidates[i::jobs] for i in range(jobs)]
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(_solve_chunk, [(inst.a, inst.b, inst.n, inst.m, chunk, bound) for chunk in chunks])
        found = [pair for part in parts for pair in part]
    else:
        found = _solve_chunk((inst.a, inst.b, inst.n, inst.m, candidates, bound))
    found.sort(key=lambda p: (_shortlex_key(p.x), _shortlex_key(p.y)))
    return found


def _shortlex_key(word: Word) -> tuple:
    return (len(word), tuple(2 * (abs(l) - 1) + (l < 0) for l in word.letters()))


def _solve_chunk(args: tuple) -> list[SolutionPair]:
    a, b, n, m, xs, bound = args
    inst_g = a ** n * b ** m
    out = []
    for x in xs:
        rem = (x ** n).inverse() * inst_g
        if rem.is_identity():
            y = x.alphabet.identity()
        else:
            rd = root(rem)
            if rd.exponent % m:
                continue
            y = rd.root ** (rd.exponent // m)
        if len(y) <= bound:
            out.append(SolutionPair(x, y))
    return out


def classify_solution(inst: EquationInstance, p: SolutionPair) -> Classification:
    """Tag a solution, trying the structural families first.

    Order: conjugate family, Bezout family, swapped conjugates, common
    maximal-cyclic subgroup, one power inside the other's subgroup,
    unclassified.  Every witness re-verifies exactly.
    """
    if not is_solution(inst, p):
        raise WordError("classify_solution requires a genuine solution")
    window = (len(p.x) + len(p.y)) // max(1, len(inst.g)) + 1
    for alpha in range(-window, window + 1):
        if conjugate_family(inst, alpha) == p:
            return Classification(Tag.CONJUGATE_FAMILY, {"alpha": alpha})
    s = power_exponent_of(inst.g, p.x)
    t = power_exponent_of(inst.g, p.y)
    if s is not None and t is not None and inst.n * s + inst.m * t == 1:
        return Classification(Tag.GCD_FAMILY, {"s": s, "t": t})
    swap_x = is_conjugate(p.x, inst.b)
    swap_y = is_conjugate(p.y, inst.a)
    if swap_x is not None and swap_y is not None:
        return Classification(
            Tag.SWAPPED,
            {"x_to_b": swap_x.conjugator, "y_to_a": swap_y.conjugator},
        )
    if not p.x.is_identity() and not p.y.is_identity():
        if same_elementary_subgroup(p.x, p.y):
            return Classification(Tag.COMMON_E, {"e_generator": elementary_generator(p.x)})
        xe = power_exponent_of(elementary_generator(p.y), p.x ** inst.n)
        if xe is not None:
            return Classification(Tag.POWER_IN_E, {"which": "x^n in E(y)", "exponent": xe})
        ye = power_exponent_of(elementary_generator(p.x), p.y ** inst.m)
        if ye is not None:
            return Classification(Tag.POWER_IN_E, {"which": "y^m in E(x)", "exponent": ye})
    return Classification(Tag.UNCLASSIFIED, {})


@dataclass(frozen=True)
class PerfectnessReport:
    instance: EquationInstance
    bound: int
    solutions: list[tuple[SolutionPair, Classification]]
    perfect_at_bound: bool
    hypothesis_flags: dict

    def exceptions(self) -> list[tuple[SolutionPair, Classification]]:
        return [(p, c) for p, c in self.solutions if c.tag is not Tag.CONJUGATE_FAMILY]

    def to_json_dict(self) -> dict:
        inst = self.instance
        return {
            "instance": {
                "a": format_word(inst.a),
                "b": format_word(inst.b),
                "n": inst.n,
                "m": inst.m,
                "g": format_word(inst.g),
            },
            "bound": self.bound,
            "solutions": [
                {
                    "x": format_word(p.x),
                    "y": format_word(p.y),
                    "classification": c.tag.value,
                    "witness": c.to_json_dict()["witness"],
                }
                for p, c in self.solutions
            ],
            "perfect_at_bound": self.perfect_at_bound,
            "hypothesis_flags": self.hypothesis_flags,
            "note": "bounded non-refutation only; no finite bound certifies perfectness",
        }


def verify_perfect(
    inst: EquationInstance,
    bound: int,
    ell: int = 1,
    threshold: int = 0,
    max_candidates: Optional[int] = None,
    jobs: int = 1,
) -> PerfectnessReport:
    """Classify every bounded solution and flag non-conjugate-family ones.

    ell and threshold are the (non-effective) divisor and size parameters
    of the perfectness statement; they are recorded as hypothesis flags,
    never enforced.
    """
    if ell < 1:
        raise WordError("ell must be >= 1")
    if threshold < 0:
        raise WordError("threshold must be >= 0")
    pairs = brute_force_solutions(inst, bound, max_candidates=max_candidates, jobs=jobs)
    tagged = [(p, classify_solution(inst, p)) for p in pairs]
    flags = {
        "ell": ell,
        "threshold": threshold,
        "n_ne_m": inst.n != inst.m,
        "n_in_ell_N": inst.n % ell == 0,
        "m_in_ell_N": inst.m % ell == 0,
    }
    perfect = all(c.tag is Tag.CONJUGATE_FAMILY for _, c in tagged)
    return PerfectnessReport(inst, bound, tagged, perfect, flags)


def conjugator_normal_form(inst: EquationInstance, u: Word, v: Word) -> Optional[int]:
    """Find r with u in <a> g^r and v in <b> g^r, searching |r| <= |u|+|v|.

    Requires (u^{-1} a^n u)(v^{-1} b^m v) = a^n b^m; raises otherwise.
    Returns None when no r lies in the window (distinct from an error).
    """
    lhs = (inst.a ** inst.n).conjugate(u) * (inst.b ** inst.m).conjugate(v)
    if lhs != inst.g:
        raise WordError("inputs do not conjugate the equation onto itself")
    window = len(u) + len(v)
    for r in range(0, window + 1):
        for sign in ((1,) if r == 0 else (1, -1)):
            cand = sign * r
            shift = inst.g ** (-cand)
            if power_exponent_of(inst.a, u * shift) is not None and power_exponent_of(inst.b, v * shift) is not None:
                return cand
    return None
