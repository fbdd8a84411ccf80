"""Finite groups as multiplication tables, with exhaustive searches.

Provides the dihedral group of order 8, central products, homomorphism
enumeration from presentations and from table groups, retraction search,
and exhaustive verbal-closedness checking.  The headline suite builds the
central product of two dihedral groups amalgamated over their centers and
verifies that one factor is verbally closed in it while the center is not
a retract of the other factor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .words import Alphabet, Word, WordError, enumerate_reduced, format_word


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    """Multiplication table with identity and inverse tables.

    Construction checks the identity and inverse laws always, and full
    associativity for orders up to 64.
    """

    mult: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...] = field(init=False)
    labels: tuple[str, ...] = ()
    gens: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        n = len(self.mult)
        if any(len(row) != n for row in self.mult):
            raise WordError("multiplication table must be square")
        e = self.identity
        for i in range(n):
            if self.mult[e][i] != i or self.mult[i][e] != i:
                raise WordError("identity law fails")
        inverse = [None] * n
        for i in range(n):
            for j in range(n):
                if self.mult[i][j] == e and self.mult[j][i] == e:
                    inverse[i] = j
                    break
            if inverse[i] is None:
                raise WordError(f"element {i} has no inverse")
        object.__setattr__(self, "inverse", tuple(inverse))
        if n <= 64:
            for i in range(n):
                for j in range(n):
                    ij = self.mult[i][j]
                    for k in range(n):
                        if self.mult[ij][k] != self.mult[i][self.mult[j][k]]:
                            raise WordError("associativity fails")
        if self.labels and len(self.labels) != n:
            raise WordError("label count mismatch")

    @property
    def order(self) -> int:
        return len(self.mult)

    def mul(self, i: int, j: int) -> int:
        return self.mult[i][j]

    def inv(self, i: int) -> int:
        return self.inverse[i]

    def power(self, i: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv(i), -k)
        out = self.identity
        for _ in range(k):
            out = self.mul(out, i)
        return out

    def element_order(self, i: int) -> int:
        out, k = i, 1
        while out != self.identity:
            out = self.mul(out, i)
            k += 1
        return k

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def closure(self, gens: Sequence[int]) -> list[int]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    for y in (self.mul(x, g), self.mul(x, self.inv(g))):
                        if y not in seen:
                            seen.add(y)
                            nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def centralizer(self, elems: Sequence[int]) -> list[int]:
        return [z for z in range(self.order) if all(self.mul(z, x) == self.mul(x, z) for x in elems)]

    def center(self) -> list[int]:
        return self.centralizer(list(range(self.order)))

    def is_central(self, z: int) -> bool:
        return all(self.mul(z, x) == self.mul(x, z) for x in range(self.order))

    def evaluate_word(self, word: Word, images: Sequence[int]) -> int:
        """Image of a symbolic word under generator index -> element."""
        out = self.identity
        for gen, exp in word.syllables:
            base = images[gen]
            out = self.mul(out, self.power(base, exp % self.element_order(base)))
        return out


def dihedral4() -> FiniteGroup:
    """Order-8 dihedral group <a, b | a^4, b^2, b^-1 a b a>.

    Elements are a^i b^j indexed i + 4j; marked generators "a" and "b".
    """
    def idx(i, j):
        return i % 4 + 4 * (j % 2)

    table = [[0] * 8 for _ in range(8)]
    for i, j, k, l in itertools.product(range(4), range(2), range(4), range(2)):
        # (a^i b^j)(a^k b^l) = a^(i + k or i - k) b^(j + l)
        shift = (i + k) if j == 0 else (i - k)
        table[idx(i, j)][idx(k, l)] = idx(shift, j + l)
    labels = tuple(
        ("a" if i == 1 else f"a^{i}" if i else "") + ("b" if j else "") or "1"
        for j in range(2) for i in range(4)
    )
    return FiniteGroup(
        tuple(tuple(r) for r in table), 0, labels=labels, gens={"a": idx(1, 0), "b": idx(0, 1)}
    )


@dataclass(frozen=True)
class CentralProduct:
    group: FiniteGroup
    embed_left: tuple[int, ...]
    embed_right: tuple[int, ...]


def central_product(a: FiniteGroup, b: FiniteGroup, za: int, zb: int) -> CentralProduct:
    """Quotient of a x b by the cyclic subgroup generated by (za, zb).

    za and zb must be central and of equal order.  Two pairs are
    identified iff they differ by a power of (za, zb); the result has
    order |a| |b| / order(za).
    """
    if not a.is_central(za):
        raise WordError("left amalgamated element is not central")
    if not b.is_central(zb):
        raise WordError("right amalgamated element is not central")
    k = a.element_order(za)
    if k != b.element_order(zb):
        raise WordError("amalgamated elements have different orders")

    def orbit(p: int, q: int):
        out = []
        x, y = p, q
        for _ in range(k):
            out.append((x, y))
            x, y = a.mul(x, za), b.mul(y, zb)
        return out

    rep: dict[tuple[int, int], tuple[int, int]] = {}
    reps: list[tuple[int, int]] = []
    for p in range(a.order):
        for q in range(b.order):
            if (p, q) in rep:
                continue
            cls = orbit(p, q)
            canon = min(cls)
            for pair in cls:
                rep[pair] = canon
            reps.append(canon)
    reps.sort()
    index = {pair: i for i, pair in enumerate(reps)}
    table = [
        [index[rep[(a.mul(p1, p2), b.mul(q1, q2))]] for (p2, q2) in reps]
        for (p1, q1) in reps
    ]
    labels = tuple(f"{a.label(p)}|{b.label(q)}" for p, q in reps)
    group = FiniteGroup(
        tuple(tuple(r) for r in table), index[rep[(a.identity, b.identity)]], labels=labels
    )
    embed_left = tuple(index[rep[(p, b.identity)]] for p in range(a.order))
    embed_right = tuple(index[rep[(a.identity, q)]] for q in range(b.order))
    return CentralProduct(group, embed_left, embed_right)


def direct_product(a: FiniteGroup, b: FiniteGroup) -> CentralProduct:
    return central_product(a, b, a.identity, b.identity)


# -- homomorphisms -----------------------------------------------------------


@dataclass(frozen=True)
class FGHom:
    """A homomorphism given by generator images, with the full element map
    when the source is a table group."""

    images: tuple[int, ...]
    mapping: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class GroupPresentation:
    num_gens: int
    relators: tuple[Word, ...]

    def __post_init__(self) -> None:
        for r in self.relators:
            if r.alphabet.rank != self.num_gens:
                raise WordError("relator alphabet does not match generator count")


def enumerate_homs(src: GroupPresentation, dst: FiniteGroup, budget: int = 10**7) -> list[FGHom]:
    """All generator-image tuples killing every relator; complete by
    exhaustion over dst^num_gens."""
    total = dst.order ** src.num_gens
    if total > budget:
        raise SearchBudgetExceeded(f"{total} assignments exceed budget {budget}")
    out = []
    for images in itertools.product(range(dst.order), repeat=src.num_gens):
        if all(dst.evaluate_word(r, images) == dst.identity for r in src.relators):
            out.append(FGHom(images))
    return out


def _generating_set(g: FiniteGroup) -> list[int]:
    """Small deterministic generating set: marked generators if they
    generate, else greedy by index."""
    if g.gens:
        marked = sorted(g.gens.values())
        if len(g.closure(marked)) == g.order:
            return marked
    gens: list[int] = []
    covered = {g.identity}
    for x in range(g.order):
        if x not in covered:
            gens.append(x)
            covered = set(g.closure(gens))
            if len(covered) == g.order:
                break
    return gens


def _expression_words(g: FiniteGroup, gens: Sequence[int]) -> list[list[int]]:
    """Each element as a product of generators (indices into gens),
    negative index meaning the inverse, found breadth-first."""
    words: dict[int, list[int]] = {g.identity: []}
    frontier = [g.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for i, gen in enumerate(gens):
                for tag, y in ((i + 1, g.mul(x, gen)), (-(i + 1), g.mul(x, g.inv(gen)))):
                    if y not in words:
                        words[y] = words[x] + [tag]
                        nxt.append(y)
        frontier = nxt
    if len(words) != g.order:
        raise WordError("generating set does not generate")
    return [words[x] for x in range(g.order)]


def enumerate_table_homs(
    src: FiniteGroup, dst_elements: Sequence[int], inside: FiniteGroup, budget: int = 10**7
) -> list[FGHom]:
    """All homomorphisms src -> <dst_elements> viewed inside ``inside``.

    Candidate generator images are extended along expression words and
    kept only when the full map is multiplicative on every pair, which is
    sound and complete.  When src is a subgroup of ``inside`` the element
    indices of src and the target agree.
    """
    gens = _generating_set(src)
    expressions = _expression_words(src, gens)
    target = sorted(set(dst_elements))
    total = len(target) ** len(gens)
    if total > budget:
        raise SearchBudgetExceeded(f"{total} assignments exceed budget {budget}")
    homs = []
    for images in itertools.product(target, repeat=len(gens)):
        mapping = []
        for expr in expressions:
            val = inside.identity
            for tag in expr:
                img = images[abs(tag) - 1]
                val = inside.mul(val, img if tag > 0 else inside.inv(img))
            mapping.append(val)
        if all(
            mapping[src.mul(x, y)] == inside.mul(mapping[x], mapping[y])
            for x in range(src.order)
            for y in range(src.order)
        ):
            homs.append(FGHom(images, tuple(mapping)))
    return homs


def is_retract(g: FiniteGroup, subgroup_gens: Sequence[int]) -> Optional[FGHom]:
    """Search all homomorphisms g -> <subgroup_gens> for one fixing the
    subgroup pointwise; None when exhaustion finds nothing."""
    subgroup = g.closure(subgroup_gens)
    for hom in enumerate_table_homs(g, subgroup, g):
        if all(hom.mapping[h] == h for h in subgroup):
            return hom
    return None


# -- verbal closedness --------------------------------------------------------


@dataclass(frozen=True)
class WordEquationReport:
    word: Word
    rhs: int
    solvable_in_group: bool
    group_witness: Optional[tuple[int, ...]]
    solvable_in_subgroup: bool
    subgroup_witness: Optional[tuple[int, ...]]

    @property
    def disagreement(self) -> bool:
        return self.solvable_in_group and not self.solvable_in_subgroup

    def to_json_dict(self) -> dict:
        return {
            "word": format_word(self.word),
            "rhs": self.rhs,
            "solvable_in_group": self.solvable_in_group,
            "solvable_in_subgroup": self.solvable_in_subgroup,
            "disagreement": self.disagreement,
        }


def _value_witnesses(g: FiniteGroup, word: Word, domain: Sequence[int]) -> dict[int, tuple[int, ...]]:
    """value -> first witness tuple over assignments from the domain."""
    nvars = word.alphabet.rank
    out: dict[int, tuple[int, ...]] = {}
    for images in itertools.product(domain, repeat=nvars):
        val = g.evaluate_word(word, images)
        if val not in out:
            out[val] = images
    return out


def verbally_closed_check(
    g: FiniteGroup,
    subgroup_gens: Sequence[int],
    corpus: Sequence[Word],
    targets: Sequence[int],
    budget: int = 10**7,
) -> list[WordEquationReport]:
    """Exhaustive solvability of W(x) = h in g versus in the subgroup.

    A disagreement is an equation solvable in g but not in the subgroup;
    every flag is backed by full enumeration and positive flags carry a
    witness assignment.
    """
    subgroup = g.closure(subgroup_gens)
    for h in targets:
        if h not in subgroup:
            raise WordError(f"target {h} lies outside the subgroup")
    reports = []
    for word in corpus:
        nvars = word.alphabet.rank
        if g.order ** nvars > budget:
            raise SearchBudgetExceeded(f"|G|^{nvars} exceeds budget {budget}")
        in_group = _value_witnesses(g, word, range(g.order))
        in_sub = _value_witnesses(g, word, subgroup)
        for h in targets:
            reports.append(
                WordEquationReport(
                    word=word,
                    rhs=h,
                    solvable_in_group=h in in_group,
                    group_witness=in_group.get(h),
                    solvable_in_subgroup=h in in_sub,
                    subgroup_witness=in_sub.get(h),
                )
            )
    return reports


def default_corpus(num_vars: int = 2, max_len: int = 4) -> list[Word]:
    """All reduced nonidentity words in the given variables up to the
    length bound, deduplicated up to renaming (permuting) the variables."""
    alph = Alphabet(num_vars)
    seen = set()
    corpus = []
    for word in enumerate_reduced(alph, max_len):
        if word.is_identity():
            continue
        keys = []
        for perm in itertools.permutations(range(num_vars)):
            keys.append(tuple((perm[g], e) for g, e in word.syllables))
        canon = min(keys)
        if canon not in seen:
            seen.add(canon)
            corpus.append(word)
    return corpus


# -- the dihedral counterexample suite ------------------------------------------


@dataclass(frozen=True)
class DihedralSuiteReport:
    orders: dict
    corpus_size: int
    targets_checked: int
    verbal_disagreements: int
    center_is_a_squared: bool
    homs_into_center: int
    retract_of_center_found: bool
    control_disagreements: int

    @property
    def ok(self) -> bool:
        return (
            self.orders == {"left": 8, "right": 8, "product": 32}
            and self.verbal_disagreements == 0
            and self.center_is_a_squared
            and not self.retract_of_center_found
            and self.control_disagreements == 1
        )

    def to_json_dict(self) -> dict:
        return {
            "groups": {"orders": dict(self.orders)},
            "claim_verbally_closed": {
                "corpus_size": self.corpus_size,
                "targets": self.targets_checked,
                "disagreements": self.verbal_disagreements,
            },
            "claim_not_retract": {
                "center_is_a_squared": self.center_is_a_squared,
                "hom_count_into_center": self.homs_into_center,
                "retract_found": self.retract_of_center_found,
            },
            "negative_control_disagreements": self.control_disagreements,
            "ok": self.ok,
        }


def dihedral_counterexample_suite(corpus: Optional[Sequence[Word]] = None) -> DihedralSuiteReport:
    """Two order-8 dihedral groups glued over their centers.

    Verifies exhaustively that the left factor is verbally closed in the
    central product, that every homomorphism of the right factor into the
    left factor's center lands in the order-2 center (so no retraction
    onto the glued center exists), and that the center inside one
    dihedral factor fails verbal closedness for x^2 = center generator
    (the negative control).
    """
    left, right = dihedral4(), dihedral4()
    za = left.power(left.gens["a"], 2)
    zb = right.power(right.gens["a"], 2)
    product = central_product(left, right, za, zb)
    g = product.group

    if corpus is None:
        corpus = default_corpus(2, 4)
    sub_gens = [product.embed_left[left.gens["a"]], product.embed_left[left.gens["b"]]]
    targets = [product.embed_left[x] for x in range(left.order)]
    reports = verbally_closed_check(g, sub_gens, corpus, targets)
    disagreements = sum(1 for r in reports if r.disagreement)

    # center of the left factor is <a^2>; any centralizing homomorphic
    # image of the right factor lies inside it
    center = left.center()
    a_squared = left.closure([za])
    center_ok = sorted(center) == sorted(a_squared)
    homs_center = enumerate_table_homs(right, center, left)
    lands = all(set(h.mapping).issubset(set(a_squared)) for h in homs_center)
    center_ok = center_ok and lands

    retract = is_retract(right, [zb])

    x_squared = Alphabet(1).generator(0) ** 2
    control = verbally_closed_check(right, [zb], [x_squared], [zb])
    control_disagreements = sum(1 for r in control if r.disagreement)

    return DihedralSuiteReport(
        orders={"left": left.order, "right": right.order, "product": g.order},
        corpus_size=len(corpus),
        targets_checked=len(targets),
        verbal_disagreements=disagreements,
        center_is_a_squared=center_ok,
        homs_into_center=len(homs_center),
        retract_of_center_found=retract is not None,
        control_disagreements=control_disagreements,
    )
