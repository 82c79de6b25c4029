"""Exact models of finitely generated groups with word metrics and balls.

Four kinds are provided: free groups, free abelian groups, finite cyclic
groups, and the infinite dihedral group.  Every element carries a canonical
normal form (a tuple of letter ids over the symmetric generating alphabet),
so equality, word length and ball indexing are exact.  Letter id 2i is the
i-th generator and 2i+1 its inverse, except for the infinite dihedral group
whose two letters are involutions.

Balls are enumerated in (length, lexicographic) order, which makes every
matrix indexing downstream reproducible bit for bit.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _speed
from .errors import BudgetExceededError, ModelMismatchError, PreconditionError

DEFAULT_BUDGET = 2_000_000

_FREE_SYMBOLS = "abcdmnpqrstuvwxyz"


class GroupModel:
    """Common interface of the group models.

    Subclasses fix the alphabet, the normal form and the sphere-count
    closed forms.  Instances are immutable and equal when their defining
    data agree.
    """

    kind: str
    name: str
    symbols: tuple[str, ...]       # positive generator symbols, in order
    letter_names: tuple[str, ...]  # full symmetric alphabet, in letter-id order
    is_finite = False

    # -- letters ---------------------------------------------------------

    @property
    def num_letters(self) -> int:
        return len(self.letter_names)

    def letter_inverse(self, letter: int) -> int:
        return letter ^ 1

    def reduce(self, letters: Sequence[int]) -> tuple[int, ...]:
        raise NotImplementedError

    # -- elements --------------------------------------------------------

    @property
    def identity(self) -> "GroupElement":
        return GroupElement(self, ())

    def generators(self) -> list["GroupElement"]:
        """The symmetric generating set, in letter-id order.

        Duplicates (self-inverse letters) and the identity (trivial cyclic
        groups) are dropped, so the result really is a generating *set*.
        """
        out: list[GroupElement] = []
        for l in range(self.num_letters):
            g = GroupElement(self, self.reduce((l,)))
            if g.word and g not in out:
                out.append(g)
        return out

    def element(self, word: str | Sequence[int]) -> "GroupElement":
        if isinstance(word, str):
            return GroupElement(self, self.reduce(_parse_word(word, self)))
        return GroupElement(self, self.reduce(tuple(word)))

    # -- counting --------------------------------------------------------

    def sphere_count(self, k: int) -> int:
        raise NotImplementedError

    def ball_size(self, radius: int) -> int:
        return sum(self.sphere_count(k) for k in range(radius + 1))

    def growth_constant(self) -> float:
        """Minimal C with #sphere(k) <= C**k for every k >= 1.

        For all four kinds the maximum of sphere(k)**(1/k) is attained at
        k = 1 (every element of length k is a word in the alphabet), so the
        constant equals the sphere-1 count, i.e. the alphabet size actually
        realized.
        """
        s1 = self.sphere_count(1)
        return float(max(s1, 1))

    # -- misc --------------------------------------------------------------

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, GroupModel) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        raise NotImplementedError


class FreeModel(GroupModel):
    """Free group F_m with the standard symmetric generating set."""

    kind = "free"

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("free rank must be >= 1")
        self.rank = rank
        self.name = f"F{rank}"
        self.symbols = tuple(_FREE_SYMBOLS[i] for i in range(rank))
        self.letter_names = tuple(
            n for s in self.symbols for n in (s, s + "^-1")
        )

    def _key(self):
        return ("free", self.rank)

    def reduce(self, letters):
        out: list[int] = []
        for l in letters:
            if out and out[-1] == (l ^ 1):
                out.pop()
            else:
                out.append(l)
        return tuple(out)

    def sphere_count(self, k):
        if k == 0:
            return 1
        m2 = 2 * self.rank
        return m2 * (m2 - 1) ** (k - 1)


class FreeAbelianModel(GroupModel):
    """Z^n with the coordinate generators and the l1 word metric."""

    kind = "free_abelian"

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("abelian rank must be >= 1")
        self.rank = rank
        self.name = "Z" if rank == 1 else f"Z{rank}"
        self.symbols = tuple(_FREE_SYMBOLS[i] for i in range(rank))
        self.letter_names = tuple(n for s in self.symbols for n in (s, s + "^-1"))

    def _key(self):
        return ("free_abelian", self.rank)

    def exponents(self, letters) -> tuple[int, ...]:
        exps = [0] * self.rank
        for l in letters:
            exps[l // 2] += 1 if l % 2 == 0 else -1
        return tuple(exps)

    def word_of_exponents(self, exps) -> tuple[int, ...]:
        out: list[int] = []
        for i, x in enumerate(exps):
            out.extend([2 * i if x > 0 else 2 * i + 1] * abs(x))
        return tuple(out)

    def reduce(self, letters):
        return self.word_of_exponents(self.exponents(letters))

    def sphere_count(self, k):
        if k == 0:
            return 1
        n = self.rank
        return sum(
            2**j * math.comb(n, j) * math.comb(k - 1, j - 1)
            for j in range(1, min(n, k) + 1)
        )


class FiniteCyclicModel(GroupModel):
    """Z/N with one generator; normal forms are minimum-length power words."""

    kind = "finite_cyclic"
    is_finite = True

    def __init__(self, order: int):
        if order < 1:
            raise ValueError("cyclic order must be >= 1")
        self.order = order
        self.name = f"ZmodN:{order}"
        self.symbols = ("a",)
        self.letter_names = ("a", "a^-1")

    def _key(self):
        return ("finite_cyclic", self.order)

    def residue(self, letters) -> int:
        r = 0
        for l in letters:
            r += 1 if l % 2 == 0 else -1
        return r % self.order

    def reduce(self, letters):
        r = self.residue(letters)
        if r <= self.order // 2:
            return (0,) * r
        return (1,) * (self.order - r)

    def sphere_count(self, k):
        if k == 0:
            return 1
        if 2 * k < self.order:
            return 2
        if 2 * k == self.order:
            return 1
        return 0


class InfiniteDihedralModel(GroupModel):
    """Infinite dihedral group <s, t | s^2 = t^2 = e>; words alternate."""

    kind = "infinite_dihedral"

    def __init__(self):
        self.name = "Dinf"
        self.symbols = ("s", "t")
        self.letter_names = ("s", "t")

    def _key(self):
        return ("infinite_dihedral",)

    def letter_inverse(self, letter):
        return letter  # both generators are involutions

    def reduce(self, letters):
        out: list[int] = []
        for l in letters:
            if out and out[-1] == l:
                out.pop()
            else:
                out.append(l)
        return tuple(out)

    def sphere_count(self, k):
        return 1 if k == 0 else 2


_MODEL_ALIASES = {"Z": ("free_abelian", 1), "Dinf": ("infinite_dihedral", None)}


def model_from_name(name: str) -> GroupModel:
    """Parse CLI/config model names: F2, F3, Z, Z2, ZmodN:5, Dinf."""
    name = name.strip()
    if name == "Dinf":
        return InfiniteDihedralModel()
    if name == "Z":
        return FreeAbelianModel(1)
    if name.startswith("ZmodN:"):
        return FiniteCyclicModel(int(name.split(":", 1)[1]))
    if name.startswith("F") and name[1:].isdigit():
        return FreeModel(int(name[1:]))
    if name.startswith("Z") and name[1:].isdigit():
        return FreeAbelianModel(int(name[1:]))
    raise ValueError(f"unknown group model {name!r} "
                     "(expected F<m>, Z, Z<n>, ZmodN:<N> or Dinf)")


class GroupElement:
    """An element in normal form.  Equality is equality of normal forms."""

    __slots__ = ("model", "word", "_hash")

    def __init__(self, model: GroupModel, word: tuple[int, ...]):
        self.model = model
        self.word = word
        self._hash = hash((model, word))

    @property
    def length(self) -> int:
        return len(self.word)

    def inverse(self) -> "GroupElement":
        m = self.model
        inv = tuple(m.letter_inverse(l) for l in reversed(self.word))
        return GroupElement(m, m.reduce(inv))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, GroupElement)
            and self.model == other.model
            and self.word == other.word
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return word_to_str(self)


def word_to_str(el: GroupElement) -> str:
    if not el.word:
        return "e"
    return "".join(el.model.letter_names[l] for l in el.word)


def _parse_word(text: str, model: GroupModel) -> tuple[int, ...]:
    """Parse words like 'ab^-1a' or 'a^3' over the model's alphabet."""
    text = text.strip()
    if text in ("", "e", "1"):
        return ()
    sym_to_letter = {s: model.letter_names.index(s) for s in model.symbols}
    letters: list[int] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c not in sym_to_letter:
            raise ValueError(f"unknown generator {c!r} in word {text!r}")
        base = sym_to_letter[c]
        i += 1
        power = 1
        if i < len(text) and text[i] == "^":
            j = i + 1
            if j < len(text) and text[j] == "-":
                j += 1
            while j < len(text) and text[j].isdigit():
                j += 1
            power = int(text[i + 1 : j])
            i = j
        letter = base if power > 0 else model.letter_inverse(base)
        letters.extend([letter] * abs(power))
    return tuple(letters)


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """Normal form of the product ab."""
    if a.model != b.model:
        raise ModelMismatchError(f"cannot compose over {a.model} and {b.model}")
    return GroupElement(a.model, a.model.reduce(a.word + b.word))


def word_length(el: GroupElement) -> int:
    return el.length


class Ball:
    """All elements of word length <= radius, in canonical (length, lex) order.

    Free-group balls are held as packed int64 codes (see ``_speed``); the
    other kinds store explicit word tuples.  Both expose the same indexing
    interface.
    """

    def __init__(self, model: GroupModel, radius: int, budget: int | None = DEFAULT_BUDGET):
        if radius < 0:
            raise PreconditionError("ball radius must be >= 0")
        predicted = model.ball_size(radius)
        if budget is not None and predicted > budget:
            raise BudgetExceededError(predicted, budget)
        self.model = model
        self.radius = radius
        self._elements: list[GroupElement] | None = None
        self._letters: np.ndarray | None = None
        self._codes: np.ndarray | None = None
        self._parents: np.ndarray | None = None
        self._pair_cache: dict[object, np.ndarray] = {}
        self._word_index: dict[tuple[int, ...], int] | None = None
        self._words: list[tuple[int, ...]] | None = None
        if isinstance(model, FreeModel):
            codes, offsets = _speed.free_ball(model.num_letters, radius)
            self._codes = codes
            self.offsets = np.asarray(offsets)
        else:
            words = _enumerate_generic(model, radius)
            self._words = words
            self._word_index = {w: i for i, w in enumerate(words)}
            offsets = [0]
            for k in range(radius + 1):
                offsets.append(offsets[-1] + model.sphere_count(k))
            self.offsets = np.asarray(offsets, dtype=np.int64)
        self.size = int(self.offsets[-1])
        assert self.size == predicted

    def __len__(self):
        return self.size

    @property
    def sphere_sizes(self) -> list[int]:
        return list(np.diff(self.offsets))

    @property
    def lengths(self) -> np.ndarray:
        """Word length of each ball element, in index order."""
        out = np.empty(self.size, dtype=np.int64)
        for k in range(self.radius + 1):
            out[self.offsets[k] : self.offsets[k + 1]] = k
        return out

    @property
    def elements(self) -> list[GroupElement]:
        if self._elements is None:
            if self._codes is not None:
                letters = self.letters_matrix()
                lens = self.lengths
                self._elements = [
                    GroupElement(self.model, tuple(int(x) for x in letters[i, : lens[i]]))
                    for i in range(self.size)
                ]
            else:
                self._elements = [GroupElement(self.model, w) for w in self._words]
        return self._elements

    def element(self, i: int) -> GroupElement:
        return self.elements[i]

    def index_of(self, el: GroupElement) -> int:
        if el.model != self.model:
            raise ModelMismatchError("element belongs to a different model")
        if self._codes is not None:
            code = _pack_word(el.word, self.model.num_letters + 1)
            i = int(np.searchsorted(self._codes, code))
            if i < self.size and self._codes[i] == code:
                return i
        else:
            i = self._word_index.get(el.word, -1)
            if i >= 0:
                return i
        raise KeyError(f"{el!r} is outside ball(radius={self.radius})")

    def __contains__(self, el: GroupElement) -> bool:
        try:
            self.index_of(el)
            return True
        except KeyError:
            return False

    def letters_matrix(self) -> np.ndarray:
        """Left-aligned int8 letter matrix padded with -1 (cached)."""
        if self._letters is None:
            width = max(self.radius, 1)
            out = np.full((self.size, width), -1, dtype=np.int8)
            if self._codes is not None:
                base = self.model.num_letters + 1
                lens = self.lengths
                tmp = self._codes.copy()
                for pos in range(width):
                    active = tmp > 0
                    if not active.any():
                        break
                    digits = tmp[active] % base - 1
                    rows = np.nonzero(active)[0]
                    out[rows, lens[active] - 1 - pos] = digits
                    tmp[active] //= base
            else:
                for i, w in enumerate(self._words):
                    out[i, : len(w)] = w
            self._letters = out
        return self._letters

    def parent_indices(self) -> np.ndarray:
        """Index of the one-letter-shorter prefix of each element (0 for e).

        Prefixes of normal forms are normal forms for all four kinds, so the
        ball is closed under taking parents.
        """
        if self._parents is None:
            if self._codes is not None:
                base = self.model.num_letters + 1
                parents = np.searchsorted(self._codes, self._codes // base)
                parents[0] = 0
                self._parents = parents.astype(np.int64)
            else:
                out = np.zeros(self.size, dtype=np.int64)
                for i, w in enumerate(self._words):
                    if w:
                        out[i] = self._word_index[w[:-1]]
                self._parents = out
        return self._parents

    def left_mult_indices(self, u: GroupElement, codomain: "Ball") -> np.ndarray:
        """Vector of codomain indices of u*s over all ball elements s (-1 outside)."""
        if isinstance(self.model, FreeModel):
            return _speed.left_mult_index(
                self._codes, list(u.word), self.model.num_letters, codomain._codes
            )
        out = np.empty(self.size, dtype=np.int64)
        for i, s in enumerate(self.elements):
            try:
                out[i] = codomain.index_of(compose(u, s))
            except KeyError:
                out[i] = -1
        return out

    def pairwise_lengths(self, other: "Ball | None" = None) -> np.ndarray:
        """Matrix of |t^-1 s| over t in self, s in other (defaults to self).

        Exact for free models via prefix cancellation; the other kinds fall
        back to explicit composition (their balls are small).  Results are
        cached on the ball: they are function-independent and reused by
        every radial window matrix.
        """
        other = other if other is not None else self
        key = ("gns", other.model._key(), other.radius)
        cached = self._pair_cache.get(key)
        if cached is not None:
            return cached
        if isinstance(self.model, FreeModel):
            out = _speed.pair_dist(
                self.letters_matrix(), self.lengths,
                other.letters_matrix(), other.lengths,
            )
        else:
            out = np.empty((self.size, other.size), dtype=np.int32)
            inverses = [t.inverse() for t in self.elements]
            for i, tinv in enumerate(inverses):
                for j, s in enumerate(other.elements):
                    out[i, j] = compose(tinv, s).length
        self._pair_cache[key] = out
        return out


def _pack_word(word: tuple[int, ...], base: int) -> int:
    code = 0
    for l in word:
        code = code * base + (l + 1)
    return code


def _enumerate_generic(model: GroupModel, radius: int) -> list[tuple[int, ...]]:
    """Sphere-by-sphere BFS in normal form, each sphere sorted lexicographically."""
    seen = {()}
    sphere: list[tuple[int, ...]] = [()]
    words: list[tuple[int, ...]] = [()]
    for k in range(1, radius + 1):
        nxt = set()
        for w in sphere:
            for l in range(model.num_letters):
                v = model.reduce(w + (l,))
                if len(v) == k and v not in seen:
                    nxt.add(v)
        sphere = sorted(nxt)
        seen |= nxt
        words.extend(sphere)
    return words


@lru_cache(maxsize=32)
def _cached_ball(model: GroupModel, radius: int) -> Ball:
    return Ball(model, radius, budget=None)


def ball(model: GroupModel, radius: int, budget: int | None = DEFAULT_BUDGET) -> Ball:
    """The ball of the given radius; refuses radii beyond the element budget."""
    predicted = model.ball_size(radius)
    if budget is not None and predicted > budget:
        raise BudgetExceededError(predicted, budget)
    return _cached_ball(model, radius)


def growth_check(model: GroupModel, max_k: int) -> tuple[float, list[int]]:
    """Smallest C with #sphere(k) <= C**k for 1 <= k <= max_k, by enumeration.

    Returns (C, sphere counts).  The counts come from an actual ball
    enumeration, so this doubles as an oracle for the closed forms.
    """
    if max_k < 1:
        raise PreconditionError("growth window must have max_k >= 1")
    b = ball(model, max_k)
    counts = [int(n) for n in b.sphere_sizes[1:]]
    c = max((n ** (1.0 / k) for k, n in enumerate(counts, start=1) if n > 0),
            default=1.0)
    return max(c, 1.0), counts
