"""Exact arithmetic in free groups.

Words are stored fully reduced, as runs of syllables ``(generator, exponent)``
with nonzero arbitrary-precision integer exponents.  Two words are equal in
the free group iff their syllable sequences are equal, so structural equality
is the word problem.  All values are immutable and hashable.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence


class WordError(ValueError):
    """Malformed word data: bad literal, bad index, alphabet mismatch."""


@dataclass(frozen=True)
class Alphabet:
    """A ranked basis x_0, ..., x_{rank-1} of a free group."""

    rank: int

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise WordError(f"alphabet rank must be >= 1, got {self.rank}")

    def generator(self, index: int) -> "Word":
        return Word.from_syllables(self, [(index, 1)])

    def generators(self) -> list["Word"]:
        return [self.generator(i) for i in range(self.rank)]

    def identity(self) -> "Word":
        return Word.from_syllables(self, [])


class Syllable(NamedTuple):
    gen: int
    exp: int


def _merge_runs(items: Iterable[tuple[int, int]]) -> tuple[Syllable, ...]:
    """Free reduction of a syllable stream via a cancellation stack."""
    stack: list[list[int]] = []
    for gen, exp in items:
        if exp == 0:
            continue
        if stack and stack[-1][0] == gen:
            stack[-1][1] += exp
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([gen, exp])
    return tuple(Syllable(g, e) for g, e in stack)


@dataclass(frozen=True)
class Word:
    """A reduced word over a fixed alphabet.

    Supports ``u * v``, ``u ** k``, ``~u`` (inverse) and the usual
    free-group operations.  The empty word is the group identity.
    """

    alphabet: Alphabet
    syllables: tuple[Syllable, ...]

    def __post_init__(self) -> None:
        prev = None
        for syl in self.syllables:
            if not 0 <= syl.gen < self.alphabet.rank:
                raise WordError(f"generator index {syl.gen} out of range for rank {self.alphabet.rank}")
            if syl.exp == 0:
                raise WordError("zero exponent in syllable")
            if prev is not None and prev == syl.gen:
                raise WordError("adjacent syllables share a generator (word not reduced)")
            prev = syl.gen

    @staticmethod
    def from_syllables(alph: Alphabet, items: Iterable[tuple[int, int]]) -> "Word":
        return Word(alph, _merge_runs(items))

    # -- basic structure -------------------------------------------------

    def __len__(self) -> int:
        """Letter length |w| over the standard basis."""
        return sum(abs(s.exp) for s in self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def letters(self) -> Iterator[int]:
        """Letters as signed integers: +-(gen+1), inverse letters negated."""
        for gen, exp in self.syllables:
            step = gen + 1 if exp > 0 else -(gen + 1)
            for _ in range(abs(exp)):
                yield step

    def _require_same_alphabet(self, other: "Word") -> None:
        if self.alphabet != other.alphabet:
            raise WordError(f"alphabet mismatch: rank {self.alphabet.rank} vs {other.alphabet.rank}")

    # -- group operations ------------------------------------------------

    def __mul__(self, other: "Word") -> "Word":
        self._require_same_alphabet(other)
        return Word(self.alphabet, _merge_runs(itertools.chain(self.syllables, other.syllables)))

    def inverse(self) -> "Word":
        return Word(self.alphabet, tuple(Syllable(g, -e) for g, e in reversed(self.syllables)))

    def __invert__(self) -> "Word":
        return self.inverse()

    def __pow__(self, k: int) -> "Word":
        if k == 0:
            return self.alphabet.identity()
        base = self if k > 0 else self.inverse()
        k = abs(k)
        core, conj = base.cyclic_reduce()
        syl = core.syllables
        if not syl:
            return self.alphabet.identity()
        if len(syl) == 1:
            powered: tuple[Syllable, ...] = (Syllable(syl[0].gen, syl[0].exp * k),)
        elif syl[0].gen != syl[-1].gen:
            powered = syl * k
        else:
            # cyclically reduced with equal end generators: exponent signs
            # agree, so the seams merge without cancellation
            seam = Syllable(syl[0].gen, syl[0].exp + syl[-1].exp)
            middle = syl[1:-1]
            powered = (syl[0],) + (middle + (seam,)) * (k - 1) + middle + (syl[-1],)
        return conj * Word(self.alphabet, powered) * conj.inverse()

    def conjugate(self, g: "Word") -> "Word":
        """g^{-1} * self * g."""
        self._require_same_alphabet(g)
        return g.inverse() * self * g

    def commutator(self, other: "Word") -> "Word":
        return self.inverse() * other.inverse() * self * other

    # -- normal forms ----------------------------------------------------

    def cyclic_reduce(self) -> tuple["Word", "Word"]:
        """Split self = u * core * u^{-1} with core cyclically reduced.

        Returns ``(core, u)``.  The core is shortest in the conjugacy class.
        """
        syl = [list(s) for s in self.syllables]
        prefix: list[tuple[int, int]] = []
        while len(syl) >= 2 and syl[0][0] == syl[-1][0] and (syl[0][1] > 0) != (syl[-1][1] > 0):
            first, last = syl[0], syl[-1]
            trim = min(abs(first[1]), abs(last[1]))
            trim = trim if first[1] > 0 else -trim
            prefix.append((first[0], trim))
            first[1] -= trim
            last[1] += trim
            if last[1] == 0:
                syl.pop()
            if first[1] == 0:
                syl.pop(0)
        core = Word(self.alphabet, tuple(Syllable(g, e) for g, e in syl))
        return core, Word.from_syllables(self.alphabet, prefix)

    def is_cyclically_reduced(self) -> bool:
        core, _ = self.cyclic_reduce()
        return core.syllables == self.syllables

    def exponent_sum(self, gen: int) -> int:
        return sum(e for g, e in self.syllables if g == gen)

    # -- text form ---------------------------------------------------------

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r}, rank={self.alphabet.rank})"


def reduce(letters: Iterable[tuple[int, int]], alph: Alphabet) -> Word:
    """Reduce a stream of (generator, exponent) pairs to a Word."""
    return Word.from_syllables(alph, letters)


def multiply(u: Word, v: Word) -> Word:
    return u * v


def invert(u: Word) -> Word:
    return u.inverse()


def power(u: Word, k: int) -> Word:
    return u ** k


def conjugate(w: Word, g: Word) -> Word:
    return w.conjugate(g)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    return w.cyclic_reduce()


def exponent_sum(w: Word, gen: int) -> int:
    return w.exponent_sum(gen)


def substitute(w: Word, images: Sequence[Word]) -> Word:
    """Homomorphic image of w under generator i -> images[i]."""
    if len(images) < w.alphabet.rank:
        raise WordError(f"need {w.alphabet.rank} images, got {len(images)}")
    if images:
        target = images[0].alphabet
        for img in images:
            if img.alphabet != target:
                raise WordError("images use mixed alphabets")
    elif w.alphabet.rank == 0:  # pragma: no cover - rank >= 1 always
        raise WordError("empty image list")
    result = images[0].alphabet.identity()
    for gen, exp in w.syllables:
        result = result * images[gen] ** exp
    return result


# -- word literals --------------------------------------------------------
#
# Grammar: a token is a lowercase letter a..z (generator 0..25), an
# uppercase letter (its inverse), or g<i> for arbitrary index i; each token
# takes an optional ^<int> suffix.  Verbose form separates tokens with
# whitespace, compact form concatenates them.  parse(format(w)) == w.

_LOWER = string.ascii_lowercase


def parse_word(text: str, alph: Alphabet) -> Word:
    items: list[tuple[int, int]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        inverted = False
        if ch == "g" and i + 1 < n and text[i + 1].isdigit():
            i += 1
            j = i
            while j < n and text[j].isdigit():
                j += 1
            gen = int(text[i:j])
            i = j
        elif ch.islower() and ch in _LOWER:
            gen = _LOWER.index(ch)
            i += 1
        elif ch.isupper() and ch.lower() in _LOWER:
            gen = _LOWER.index(ch.lower())
            inverted = True
            i += 1
        elif ch == "1":
            # allow a bare 1 for the identity in hand-written literals
            i += 1
            continue
        else:
            raise WordError(f"unexpected character {ch!r} at position {i} in {text!r}")
        exp = 1
        if i < n and text[i] == "^":
            i += 1
            j = i
            if j < n and text[j] in "+-":
                j += 1
            if j >= n or not text[j].isdigit():
                raise WordError(f"malformed exponent at position {i} in {text!r}")
            while j < n and text[j].isdigit():
                j += 1
            exp = int(text[i:j])
            i = j
        if inverted:
            exp = -exp
        if gen >= alph.rank:
            raise WordError(f"generator index {gen} out of range for rank {alph.rank}")
        items.append((gen, exp))
    return Word.from_syllables(alph, items)


def format_word(w: Word) -> str:
    if not w.syllables:
        return ""
    if w.alphabet.rank <= 26:
        parts = []
        for gen, exp in w.syllables:
            letter = _LOWER[gen]
            if exp == 1:
                parts.append(letter)
            elif exp == -1:
                parts.append(letter.upper())
            else:
                parts.append(f"{letter}^{exp}")
        return "".join(parts)
    parts = [f"g{gen}" + ("" if exp == 1 else f"^{exp}") for gen, exp in w.syllables]
    return " ".join(parts)


def enumerate_reduced(alph: Alphabet, max_len: int) -> Iterator[Word]:
    """All reduced words of letter length <= max_len, shortest first.

    Within a length class the order is lexicographic on letter sequences,
    letters ordered a < a^-1 < b < b^-1 < ...  Yields each word exactly once;
    the count is 1 + sum_{n=1..max_len} 2k(2k-1)^{n-1} for rank k.
    """
    if max_len < 0:
        raise WordError("max_len must be >= 0")
    yield alph.identity()
    # letters as (gen, sign), ordered; a letter may not follow its inverse
    letters = [(g, s) for g in range(alph.rank) for s in (1, -1)]
    frontier: list[list[tuple[int, int]]] = [[]]
    for _ in range(max_len):
        extended: list[list[tuple[int, int]]] = []
        for prefix in frontier:
            for gen, sign in letters:
                if prefix and prefix[-1] == (gen, -sign):
                    continue
                ext = prefix + [(gen, sign)]
                extended.append(ext)
                yield Word.from_syllables(alph, ext)
        frontier = extended


def count_reduced(rank: int, max_len: int) -> int:
    """Closed-form count of reduced words of length <= max_len."""
    return 1 + sum(2 * rank * (2 * rank - 1) ** (n - 1) for n in range(1, max_len + 1))
