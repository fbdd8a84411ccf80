"""Recursive test words and their bounded verification.

A level-n test word lives in the free group on x_1..x_n, y_3..y_n.  The
level-3 base word is built from a tuple of ten positive exponents; each
further level wraps the previous word in the same shell with a fresh pair
of variables.  For a tuple of target elements, the canonical solutions of
W(targets) = W(vars) are the targets conjugated by powers of the common
value; the bounded verifier hunts for any other solutions.

The ten exponents are user parameters: the construction is verified for
its consequences, never claimed to yield a genuine test word outright.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .words import Alphabet, Word, WordError, enumerate_reduced, count_reduced, format_word
from .oracles import is_special_tuple


@dataclass(frozen=True)
class ExponentTuple:
    """Ten positive shell exponents."""

    k1: int
    l1: int
    m1: int
    k2: int
    l2: int
    m2: int
    s: int
    p: int
    q: int
    t: int

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if value < 1:
                raise WordError(f"exponent {name} must be >= 1, got {value}")

    def as_dict(self) -> dict:
        return {
            "k1": self.k1, "l1": self.l1, "m1": self.m1,
            "k2": self.k2, "l2": self.l2, "m2": self.m2,
            "s": self.s, "p": self.p, "q": self.q, "t": self.t,
        }

    @staticmethod
    def uniform(e: int) -> "ExponentTuple":
        """All ten exponents equal to e; satisfies every divisibility need."""
        return ExponentTuple(*([e] * 10))

    @staticmethod
    def from_list(values: Sequence[int]) -> "ExponentTuple":
        if len(values) != 10:
            raise WordError(f"need 10 exponents, got {len(values)}")
        return ExponentTuple(*values)


def variable_count(level: int) -> int:
    """x_1..x_level plus y_3..y_level."""
    return 2 * level - 2


def x_index(level: int, i: int) -> int:
    if not 1 <= i <= level:
        raise WordError(f"x_{i} out of range at level {level}")
    return i - 1


def y_index(level: int, j: int) -> int:
    if not 3 <= j <= level:
        raise WordError(f"y_{j} out of range at level {level}")
    return level + (j - 3)


def variable_name(level: int, index: int) -> str:
    if index < level:
        return f"x{index + 1}"
    return f"y{index - level + 3}"


@dataclass(frozen=True)
class SymbolicWord:
    """A reduced word in the variables of a given level."""

    level: int
    word: Word

    def __post_init__(self) -> None:
        if self.level < 3:
            raise WordError("levels start at 3")
        if self.word.alphabet.rank != variable_count(self.level):
            raise WordError(
                f"level {self.level} needs {variable_count(self.level)} variables, "
                f"word has rank {self.word.alphabet.rank}"
            )

    def variables_used(self) -> set[str]:
        return {variable_name(self.level, s.gen) for s in self.word.syllables}

    def __str__(self) -> str:
        parts = []
        for gen, exp in self.word.syllables:
            name = variable_name(self.level, gen)
            parts.append(name if exp == 1 else f"{name}^{exp}")
        return " ".join(parts) if parts else "1"


def base_test_word(e: ExponentTuple) -> SymbolicWord:
    """The level-3 word ((x1^k1 x3^l1)^m1 (x2^k2 x3^l2)^m2)^s (x2^p (x3 y3)^q)^t."""
    alph = Alphabet(variable_count(3))
    x1, x2, x3, y3 = (alph.generator(i) for i in range(4))
    head = ((x1 ** e.k1 * x3 ** e.l1) ** e.m1 * (x2 ** e.k2 * x3 ** e.l2) ** e.m2) ** e.s
    tail = (x2 ** e.p * (x3 * y3) ** e.q) ** e.t
    return SymbolicWord(3, head * tail)


def lift(w: SymbolicWord, e: ExponentTuple) -> SymbolicWord:
    """Wrap a level-n word in the shell, producing the level-(n+1) word.

    The shell is ((X^k1 x_{n+1}^l1)^m1 (x_n^k2 x_{n+1}^l2)^m2)^s
    (x_n^p (x_{n+1} y_{n+1})^q)^t with X the lifted word.
    """
    n = w.level
    target = Alphabet(variable_count(n + 1))
    # re-embed: x-indices are stable, y-indices shift up by one
    embedded = Word.from_syllables(
        target,
        [(g if g < n else g + 1, exp) for g, exp in w.word.syllables],
    )
    xn = target.generator(x_index(n + 1, n))
    xn1 = target.generator(x_index(n + 1, n + 1))
    yn1 = target.generator(y_index(n + 1, n + 1))
    head = ((embedded ** e.k1 * xn1 ** e.l1) ** e.m1 * (xn ** e.k2 * xn1 ** e.l2) ** e.m2) ** e.s
    tail = (xn ** e.p * (xn1 * yn1) ** e.q) ** e.t
    return SymbolicWord(n + 1, head * tail)


@dataclass(frozen=True)
class TestWordSpec:
    """Level plus one exponent tuple per construction step."""

    __test__ = False  # not a pytest class, despite the name

    level: int
    tuples: tuple[ExponentTuple, ...]

    def __post_init__(self) -> None:
        if self.level < 3:
            raise WordError("levels start at 3")
        if len(self.tuples) != self.level - 2:
            raise WordError(f"level {self.level} needs {self.level - 2} exponent tuples")

    def build(self) -> SymbolicWord:
        word = base_test_word(self.tuples[0])
        for e in self.tuples[1:]:
            word = lift(word, e)
        return word

    def to_json_dict(self) -> dict:
        return {"level": self.level, "tuples": [list(t.as_dict().values()) for t in self.tuples]}

    @staticmethod
    def from_json_dict(data: dict) -> "TestWordSpec":
        return TestWordSpec(data["level"], tuple(ExponentTuple.from_list(t) for t in data["tuples"]))


def evaluate(w: SymbolicWord, assignment: Mapping[str, Word]) -> Word:
    """Homomorphic image under variable name -> word, reduced."""
    images: list[Optional[Word]] = [None] * variable_count(w.level)
    for name, value in assignment.items():
        index = _parse_variable(w.level, name)
        images[index] = value
    used = {s.gen for s in w.word.syllables}
    missing = [variable_name(w.level, g) for g in sorted(used) if images[g] is None]
    if missing:
        raise WordError(f"assignment missing variables: {', '.join(missing)}")
    target = None
    for img in images:
        if img is not None:
            if target is None:
                target = img.alphabet
            elif img.alphabet != target:
                raise WordError("assignment words use mixed alphabets")
    assert target is not None
    result = target.identity()
    for gen, exp in w.word.syllables:
        result = result * images[gen] ** exp
    return result


def _parse_variable(level: int, name: str) -> int:
    kind, num = name[0], name[1:]
    if kind == "x" and num.isdigit():
        return x_index(level, int(num))
    if kind == "y" and num.isdigit():
        return y_index(level, int(num))
    raise WordError(f"bad variable name {name!r}")


def target_assignment(w: SymbolicWord, targets: Sequence[Word]) -> dict:
    """x_i -> targets[i-1], every y_j -> identity."""
    if len(targets) != w.level:
        raise WordError(f"level {w.level} needs {w.level} target words")
    alph = targets[0].alphabet
    assignment = {f"x{i + 1}": t for i, t in enumerate(targets)}
    for j in range(3, w.level + 1):
        assignment[f"y{j}"] = alph.identity()
    return assignment


def base_value(w: SymbolicWord, targets: Sequence[Word]) -> Word:
    """The common value U = W(targets, 1, ..., 1)."""
    return evaluate(w, target_assignment(w, targets))


def canonical_solutions(w: SymbolicWord, targets: Sequence[Word], alpha: int) -> dict:
    """The assignment x_i -> targets[i]^{U^alpha}, y_j -> 1.

    Conjugation by U fixes U, so this solves W(vars) = U for every alpha.
    """
    u = base_value(w, targets)
    if u.is_identity():
        raise WordError("common value is the identity; canonical family undefined")
    shift = u ** alpha
    assignment = target_assignment(w, targets)
    return {
        name: (value.conjugate(shift) if name.startswith("x") else value)
        for name, value in assignment.items()
    }


# -- bounded verification ----------------------------------------------------


@dataclass(frozen=True)
class Violation:
    assignment: dict

    def to_json_dict(self) -> dict:
        return {name: format_word(word) for name, word in sorted(self.assignment.items())}


@dataclass(frozen=True)
class TestWordReport:
    __test__ = False  # not a pytest class, despite the name

    violations: list[Violation]
    explored: int
    total: int
    exhausted: bool
    special_tuple_ok: bool
    alpha_window: int
    common_value: Word

    def to_json_dict(self) -> dict:
        return {
            "violations": [v.to_json_dict() for v in self.violations],
            "explored": self.explored,
            "total": self.total,
            "exhausted": self.exhausted,
            "explored_fraction": self.explored / self.total if self.total else 1.0,
            "special_tuple_ok": self.special_tuple_ok,
            "alpha_window": self.alpha_window,
            "common_value": format_word(self.common_value),
        }


def _letter_evaluate(w: SymbolicWord, images: Sequence[Word]) -> Word:
    """Independent letter-by-letter evaluation used to re-verify violations."""
    target = images[0].alphabet
    out: list[int] = []
    for letter in w.word.letters():
        image = images[abs(letter) - 1]
        piece = list(image.letters()) if letter > 0 else [-l for l in reversed(list(image.letters()))]
        for x in piece:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return Word.from_syllables(target, [(abs(l) - 1, 1 if l > 0 else -1) for l in out])


def verify_testword(
    w: SymbolicWord,
    targets: Sequence[Word],
    bound: int,
    max_assignments: Optional[int] = None,
) -> TestWordReport:
    """Search every assignment with images of length <= bound for violations.

    A violation solves W(assignment) = W(targets, 1..1) without being a
    canonical solution for any alpha in the window.  An empty report is
    bounded non-refutation, not a proof.  The special-tuple hypothesis on
    the targets is recorded, not enforced, so hypothesis-violating control
    runs can demonstrate genuine violations.
    """
    special_ok = bool(is_special_tuple(targets))
    u = base_value(w, targets)
    nvars = variable_count(w.level)
    var_names = [variable_name(w.level, i) for i in range(nvars)]
    alpha_window = bound // max(1, len(u)) + 1
    canonical: list[dict] = []
    if u.is_identity():
        canonical.append(target_assignment(w, targets))
    else:
        for alpha in range(-alpha_window, alpha_window + 1):
            canonical.append(canonical_solutions(w, targets, alpha))

    candidates = list(enumerate_reduced(targets[0].alphabet, bound))
    total = len(candidates) ** nvars
    budget = total if max_assignments is None else min(total, max_assignments)

    # cheap prune: running prefix length minus what the suffix could cancel
    suffix_weight = [0] * (len(w.word.syllables) + 1)
    for i in range(len(w.word.syllables) - 1, -1, -1):
        suffix_weight[i] = suffix_weight[i + 1] + abs(w.word.syllables[i].exp) * bound

    violations: list[Violation] = []
    explored = 0
    for images in itertools.product(candidates, repeat=nvars):
        if explored >= budget:
            break
        explored += 1
        value = images[0].alphabet.identity()
        ok = True
        for pos, (gen, exp) in enumerate(w.word.syllables):
            value = value * images[gen] ** exp
            if len(value) - suffix_weight[pos + 1] > len(u):
                ok = False
                break
        if not ok or value != u:
            continue
        assignment = dict(zip(var_names, images))
        if any(assignment == c for c in canonical):
            continue
        # re-verify through the independent letter-level evaluator
        if _letter_evaluate(w, images) != u:
            raise AssertionError("search and letter oracle disagree")
        violations.append(Violation(assignment))
    return TestWordReport(
        violations=violations,
        explored=explored,
        total=total,
        exhausted=explored == total,
        special_tuple_ok=special_ok,
        alpha_window=alpha_window,
        common_value=u,
    )


# -- exponent-sum certificates ------------------------------------------------


@dataclass(frozen=True)
class CertificateResult:
    """Two integer 2x2 matrices whose nonzero determinants pin down the
    conjugation exponents in the uniqueness argument for the level-3 word.

    The first matrix records the images of the head factors under the
    homomorphism killing the third target; the second under the
    homomorphism killing the second.  Acting on exponent pairs, both must
    be injective, which forces all four exponents to vanish.
    """

    m_phi: tuple[tuple[int, int], tuple[int, int]]
    m_psi: tuple[tuple[int, int], tuple[int, int]]

    @property
    def det_phi(self) -> int:
        (a, b), (c, d) = self.m_phi
        return a * d - b * c

    @property
    def det_psi(self) -> int:
        (a, b), (c, d) = self.m_psi
        return a * d - b * c

    @property
    def ok(self) -> bool:
        return self.det_phi != 0 and self.det_psi != 0

    def to_json_dict(self) -> dict:
        return {
            "m_phi": [list(r) for r in self.m_phi],
            "m_psi": [list(r) for r in self.m_psi],
            "det_phi": self.det_phi,
            "det_psi": self.det_psi,
            "verdict": "pass" if self.ok else "fail",
        }


def exponent_sum_certificates(e: ExponentTuple, m: int) -> CertificateResult:
    """Certificate matrices for the uniqueness argument, exact integers.

    Requires m to divide k1, k2, l1, l2, p and q, so that all entries are
    integers (the underlying homomorphisms are defined on m-th powers).
    """
    if m < 1:
        raise WordError("modulus must be positive")
    for name in ("k1", "k2", "l1", "l2", "p", "q"):
        if getattr(e, name) % m:
            raise WordError(f"{m} does not divide {name} = {getattr(e, name)}")
    m_phi = ((-e.k1 // m, 0), (0, e.k2 // m))
    m_psi = (
        (-(e.k1 * e.m1) // m, 0),
        (-(e.l1 * e.m1 + e.l2 * e.m2) // m, e.q // m),
    )
    return CertificateResult(m_phi, m_psi)
