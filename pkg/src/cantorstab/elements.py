"""The three computable families of homeomorphisms of the word space.

* ``TreeAutomorphism`` — unevaluated words over the named generators of a
  ``WreathTable`` (root permutation + one section name per letter).  Sections
  of a word never get longer than the word itself, so section closures are
  finite and identity testing has an honest budgeted oracle.
* ``PrefixBijection`` — bijections given by a finite complete-prefix-code
  rule set ``u_j -> v_j`` (exchange the prefix, keep the tail).
* ``FullGroupTable`` — piecewise powers of the binary odometer (add one with
  carry), given by rows ``(cylinder, power)`` whose cylinders partition the
  space.

All values are immutable; composition/inversion stay inside one family.
``g * h`` applies ``h`` first, and ``~g`` is the inverse.
"""

from __future__ import annotations

import re
from enum import Enum

from .space import (
    Alphabet,
    BoundaryPoint,
    Word,
)


class Tri(Enum):
    """Three-valued verdict; UNKNOWN means a budget ran out, never a guess."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def tri_all(verdicts) -> Tri:
    """Three-valued conjunction: NO dominates, then UNKNOWN."""
    result = Tri.YES
    for v in verdicts:
        if v is Tri.NO:
            return Tri.NO
        if v is Tri.UNKNOWN:
            result = Tri.UNKNOWN
    return result


class FamilyMismatch(TypeError):
    """Composition/inversion across distinct element families."""


class UnresolvedWord(ValueError):
    """Word shorter than the element's resolution depth."""


class NoCycleWithinBound(RuntimeError):
    """Point-image recursion did not close within the state budget."""


class IncompleteCode(ValueError):
    """Prefix code does not cover the whole space."""


class OverlappingCode(ValueError):
    """Prefix code has one word extending another."""


class NotBijective(ValueError):
    """Rule images do not partition the space."""


class TablePowerExceeded(ValueError):
    """A table row would need an odometer power beyond the hard bound."""


ACT_POINT_STATE_BUDGET = 4096

GENERATOR_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*(?:@[0-9]+)?")


# ---------------------------------------------------------------------------
# wreath tables and tree automorphisms


class WreathTable:
    """Named self-similar generators: root permutation + section per letter.

    ``entries`` maps a name to ``(perm, sections)`` where ``perm`` is a tuple
    permutation of the alphabet and ``sections`` is a tuple of generator
    names or ``None`` (identity), one per letter.  Generators listed in
    ``involutive`` rewrite ``x x -> 1`` and ``x^-1 -> x``; the declarations
    are rewriting hints and must be confirmed by the identity oracle.

    Localized names ``"g@v"`` (``v`` a digit word) resolve structurally to
    the automorphism acting as ``g`` on the subtree below ``v`` and
    trivially elsewhere.

    The section cache only memoizes a pure function, so shared concurrent
    use cannot change observable results.
    """

    def __init__(self, alphabet: Alphabet, entries: dict, involutive=()):
        self.alphabet = alphabet
        self.entries = dict(entries)
        self.involutive = frozenset(involutive)
        identity = tuple(range(alphabet.size))
        for name, (perm, sections) in self.entries.items():
            if not GENERATOR_NAME_RE.fullmatch(name) or "@" in name:
                raise ValueError(f"bad generator name {name!r}")
            if sorted(perm) != list(identity):
                raise ValueError(f"{name}: root action {perm} is not a permutation")
            if len(sections) != alphabet.size:
                raise ValueError(f"{name}: expected {alphabet.size} sections")
            for s in sections:
                if s is not None and s.split("@")[0] not in self.entries:
                    raise ValueError(f"{name}: unknown section {s!r}")
        for name in self.involutive:
            if name not in self.entries:
                raise ValueError(f"involutive name {name!r} not in table")
        self._identity_perm = identity
        self._section_cache: dict = {}

    def resolve(self, name: str) -> tuple[tuple[int, ...], tuple]:
        """Permutation and section names of a (possibly localized) generator."""
        if name in self.entries:
            return self.entries[name]
        base, _, path = name.partition("@")
        if not path:
            raise KeyError(name)
        if base not in self.entries:
            raise KeyError(f"unknown generator {base!r} in {name!r}")
        letter = int(path[0])
        child = base if len(path) == 1 else f"{base}@{path[1:]}"
        sections = tuple(child if a == letter else None for a in self.alphabet.letters())
        return self._identity_perm, sections

    def factor_perm(self, name: str, exp: int) -> tuple[int, ...]:
        perm, _ = self.resolve(name)
        if exp == 1:
            return perm
        inv = [0] * len(perm)
        for i, p in enumerate(perm):
            inv[p] = i
        return tuple(inv)

    def factor_section(self, name: str, exp: int, letter: int):
        """Section of ``name^exp`` at ``letter`` as a reduced one-letter word."""
        perm, sections = self.resolve(name)
        if exp == 1:
            s = sections[letter]
        else:
            # (g^-1)|_x = (g|_{g^-1 x})^-1
            s = sections[self.factor_perm(name, -1)[letter]]
        if s is None:
            return ()
        if s in self.involutive:
            return ((s, 1),)
        return ((s, exp),)

    def reduce(self, word) -> tuple:
        """Free reduction plus involution rewriting of a generator word."""
        out: list = []
        for name, exp in word:
            if name in self.involutive:
                exp = 1
            if out and out[-1][0] == name and (
                name in self.involutive or out[-1][1] == -exp
            ):
                out.pop()
            else:
                out.append((name, exp))
        return tuple(out)


class GroupElement:
    """Common contract: act on words and points, compose, invert, sections."""

    alphabet: Alphabet

    def act_word(self, w: Word) -> Word:
        raise NotImplementedError

    def act_point(self, x: BoundaryPoint) -> BoundaryPoint:
        raise NotImplementedError

    def section(self, w: Word) -> "GroupElement":
        raise NotImplementedError

    def compose(self, other: "GroupElement") -> "GroupElement":
        raise NotImplementedError

    def inverse(self) -> "GroupElement":
        raise NotImplementedError

    def is_identity(self, budget: int = 512) -> Tri:
        raise NotImplementedError

    def resolution_depth(self) -> int:
        raise NotImplementedError

    def identity_like(self) -> "GroupElement":
        raise NotImplementedError

    def __mul__(self, other):
        return self.compose(other)

    def __invert__(self):
        return self.inverse()


class TreeAutomorphism(GroupElement):
    """Reduced word over a wreath table; depth-preserving on finite words."""

    __slots__ = ("table", "word", "alphabet")

    def __init__(self, table: WreathTable, word=()):
        self.table = table
        self.word = table.reduce(word)
        self.alphabet = table.alphabet

    @classmethod
    def generator(cls, table: WreathTable, name: str, exp: int = 1) -> "TreeAutomorphism":
        table.resolve(name)
        return cls(table, ((name, exp),))

    @classmethod
    def identity(cls, table: WreathTable) -> "TreeAutomorphism":
        return cls(table, ())

    def __eq__(self, other):
        return (
            isinstance(other, TreeAutomorphism)
            and self.table is other.table
            and self.word == other.word
        )

    def __hash__(self):
        return hash((id(self.table), self.word))

    def __repr__(self):
        return f"TreeAutomorphism({format_generator_word(self.word) or '1'})"

    def _check_family(self, other):
        if not isinstance(other, TreeAutomorphism) or other.table is not self.table:
            raise FamilyMismatch("tree automorphisms must share a wreath table")

    def root_image(self, letter: int) -> int:
        for name, exp in reversed(self.word):
            letter = self.table.factor_perm(name, exp)[letter]
        return letter

    def section_at(self, letter: int) -> "TreeAutomorphism":
        key = (self.word, letter)
        cached = self.table._section_cache.get(key)
        if cached is None:
            parts: list = []
            cur = letter
            for name, exp in reversed(self.word):
                parts.append(self.table.factor_section(name, exp, cur))
                cur = self.table.factor_perm(name, exp)[cur]
            word: list = []
            for part in reversed(parts):
                word.extend(part)
            cached = self.table.reduce(word)
            self.table._section_cache[key] = cached
        return TreeAutomorphism(self.table, cached)

    def act_word(self, w: Word) -> Word:
        self.alphabet.check(w.alphabet)
        out = []
        elem = self
        for letter in w:
            out.append(elem.root_image(letter))
            elem = elem.section_at(letter)
        return Word(tuple(out), self.alphabet)

    def act_point(self, x: BoundaryPoint) -> BoundaryPoint:
        self.alphabet.check(x.alphabet)
        return _act_point_by_sections(self, x)

    def section(self, w: Word) -> "TreeAutomorphism":
        self.alphabet.check(w.alphabet)
        elem = self
        for letter in w:
            elem = elem.section_at(letter)
        return elem

    def compose(self, other) -> "TreeAutomorphism":
        self._check_family(other)
        return TreeAutomorphism(self.table, self.word + other.word)

    def inverse(self) -> "TreeAutomorphism":
        return TreeAutomorphism(
            self.table, tuple((n, -e) for n, e in reversed(self.word))
        )

    def is_identity(self, budget: int = 512) -> Tri:
        """Budgeted coinductive check: the section closure of the element
        must stay within ``budget`` distinct reduced words, all with trivial
        root action."""
        seen = {self.word}
        stack = [self.word]
        while stack:
            word = stack.pop()
            elem = TreeAutomorphism(self.table, word)
            for letter in self.alphabet.letters():
                if elem.root_image(letter) != letter:
                    return Tri.NO
            for letter in self.alphabet.letters():
                sec = elem.section_at(letter).word
                if sec and sec not in seen:
                    if len(seen) >= budget:
                        return Tri.UNKNOWN
                    seen.add(sec)
                    stack.append(sec)
        return Tri.YES

    def resolution_depth(self) -> int:
        return 0

    def identity_like(self) -> "TreeAutomorphism":
        return TreeAutomorphism.identity(self.table)

    def _state_key(self):
        return self.word


def _act_point_by_sections(elem, x: BoundaryPoint) -> BoundaryPoint:
    """Exact image of an eventually periodic point.

    Follows sections along ``x``; once inside the periodic part, the
    (section, phase) state must repeat, and the output letters between the
    two occurrences form the image period.
    """
    pre_len = len(x.preperiod)
    per_len = len(x.period)
    out: list[int] = []
    seen: dict = {}
    n = 0
    while True:
        if n >= pre_len:
            state = (elem._state_key(), (n - pre_len) % per_len)
            if state in seen:
                start = seen[state]
                return BoundaryPoint(tuple(out[:start]), tuple(out[start:]), x.alphabet)
            if len(seen) >= ACT_POINT_STATE_BUDGET:
                raise NoCycleWithinBound(
                    f"no closing state within {ACT_POINT_STATE_BUDGET} steps"
                )
            seen[state] = n
        letter = x.letter_at(n)
        out.append(elem.root_image(letter))
        elem = elem.section_at(letter)
        n += 1


# ---------------------------------------------------------------------------
# prefix bijections


def _prefix_free(words) -> bool:
    ws = sorted(words)
    return all(ws[i] != ws[i + 1][: len(ws[i])] for i in range(len(ws) - 1))


def _code_complete(words, size: int) -> bool:
    depth = max((len(w) for w in words), default=0)
    return sum(size ** (depth - len(w)) for w in words) == size**depth


def _validate_code(words, size: int, side: str):
    if not _prefix_free(words):
        if side == "domain":
            raise OverlappingCode(f"{side} code has nested words")
        raise NotBijective(f"{side} code has nested words")
    if not _code_complete(words, size):
        if side == "domain":
            raise IncompleteCode(f"{side} code does not cover the space")
        raise NotBijective(f"{side} code does not cover the space")


class PrefixBijection(GroupElement):
    """Homeomorphism replacing a prefix ``u_j`` by ``v_j``, tail unchanged.

    Both ``{u_j}`` and ``{v_j}`` must be complete prefix codes; validated at
    construction.  Rules are canonicalized by merging sibling rules that
    agree (``u0 -> v0, u1 -> v1`` becomes ``u -> v``), so the stored rule
    set is a normal form.
    """

    __slots__ = ("alphabet", "rules")

    def __init__(self, rules, alphabet: Alphabet | None = None):
        pairs = []
        for u, v in rules:
            u = u if isinstance(u, Word) else Word.from_string(u, alphabet or Alphabet(2))
            v = v if isinstance(v, Word) else Word.from_string(v, u.alphabet)
            u.alphabet.check(v.alphabet)
            if alphabet is None:
                alphabet = u.alphabet
            else:
                alphabet.check(u.alphabet)
            pairs.append((u.letters, v.letters))
        if not pairs:
            raise IncompleteCode("rule set must be nonempty")
        self.alphabet = alphabet
        size = self.alphabet.size
        _validate_code([u for u, _ in pairs], size, "domain")
        _validate_code([v for _, v in pairs], size, "range")
        self.rules = tuple(sorted(_merge_rules(pairs, size)))

    def __eq__(self, other):
        return (
            isinstance(other, PrefixBijection)
            and self.alphabet == other.alphabet
            and self.rules == other.rules
        )

    def __hash__(self):
        return hash((self.alphabet, self.rules))

    def __repr__(self):
        body = ", ".join(
            f"{''.join(map(str, u))}->{''.join(map(str, v))}" for u, v in self.rules
        )
        return f"PrefixBijection({body})"

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "PrefixBijection":
        return cls([(Word((), alphabet), Word((), alphabet))], alphabet)

    def _check_family(self, other):
        if not isinstance(other, PrefixBijection) or other.alphabet != self.alphabet:
            raise FamilyMismatch("prefix bijections must share an alphabet")

    def _rule_for(self, letters) -> tuple | None:
        for u, v in self.rules:
            if letters[: len(u)] == u:
                return u, v
        return None

    def act_word(self, w: Word) -> Word:
        self.alphabet.check(w.alphabet)
        rule = self._rule_for(w.letters)
        if rule is None:
            raise UnresolvedWord(f"word {w} shorter than resolution depth {self.resolution_depth()}")
        u, v = rule
        return Word(v + w.letters[len(u):], self.alphabet)

    def act_point(self, x: BoundaryPoint) -> BoundaryPoint:
        self.alphabet.check(x.alphabet)
        depth = self.resolution_depth()
        rule = self._rule_for(x.prefix(depth).letters)
        u, v = rule
        return x.shift(len(u)).prepend(Word(v, self.alphabet))

    def section(self, w: Word) -> "PrefixBijection":
        self.alphabet.check(w.alphabet)
        if self._rule_for(w.letters) is None:
            raise UnresolvedWord(f"word {w} does not resolve a rule")
        return PrefixBijection.identity(self.alphabet)

    def compose(self, other) -> "PrefixBijection":
        self._check_family(other)
        out = []

        def refine(u, v):
            rule = self._rule_for(v)
            if rule is not None:
                p, q = rule
                out.append((Word(u, self.alphabet), Word(q + v[len(p):], self.alphabet)))
            else:
                for a in self.alphabet.letters():
                    refine(u + (a,), v + (a,))

        for u, v in other.rules:
            refine(u, v)
        return PrefixBijection(out, self.alphabet)

    def inverse(self) -> "PrefixBijection":
        return PrefixBijection(
            [(Word(v, self.alphabet), Word(u, self.alphabet)) for u, v in self.rules],
            self.alphabet,
        )

    def is_identity(self, budget: int = 512) -> Tri:
        return Tri.YES if all(u == v for u, v in self.rules) else Tri.NO

    def resolution_depth(self) -> int:
        return max(len(u) for u, _ in self.rules)

    def identity_like(self) -> "PrefixBijection":
        return PrefixBijection.identity(self.alphabet)

def _merge_rules(pairs, size: int):
    """Merge sibling rules ``u a -> v a`` (all letters a) into ``u -> v``."""
    rules = {u: v for u, v in pairs}
    changed = True
    while changed:
        changed = False
        for u in sorted(rules, key=len, reverse=True):
            if not u or u not in rules:
                continue
            stem = u[:-1]
            siblings = [stem + (a,) for a in range(size)]
            if all(s in rules for s in siblings):
                images = [rules[s] for s in siblings]
                if all(img and img[-1] == s[-1] and img[:-1] == images[0][:-1]
                       for img, s in zip(images, siblings)):
                    for s in siblings:
                        del rules[s]
                    rules[stem] = images[0][:-1]
                    changed = True
    return list(rules.items())


# ---------------------------------------------------------------------------
# odometer full-group tables


MAX_TABLE_POWER = 64


def _word_value(letters) -> int:
    return sum(a << i for i, a in enumerate(letters))


def _value_word(value: int, length: int) -> tuple[int, ...]:
    value %= 1 << length
    return tuple((value >> i) & 1 for i in range(length))


def odometer_word_image(letters, power: int) -> tuple[int, ...]:
    """Image of a depth-d cylinder under the odometer power (add with carry,
    least-significant letter first)."""
    return _value_word(_word_value(letters) + power, len(letters))


class FullGroupTable(GroupElement):
    """Piecewise power of the binary odometer.

    Rows ``(cylinder, power)`` with the cylinders partitioning the space;
    a point with prefix ``c`` maps through the odometer applied ``power``
    times.  Row cylinders and row images must both partition the space
    (checked at construction), and ``|power| <= 64`` keeps refinement
    depths bounded.
    """

    __slots__ = ("alphabet", "rows")

    def __init__(self, rows):
        self.alphabet = Alphabet(2)
        norm = []
        for c, k in rows:
            letters = c.letters if isinstance(c, Word) else tuple(int(ch) for ch in str(c))
            if abs(k) > MAX_TABLE_POWER:
                raise TablePowerExceeded(f"row power {k} exceeds bound {MAX_TABLE_POWER}")
            norm.append((letters, int(k)))
        if not norm:
            raise IncompleteCode("table must have at least one row")
        _validate_code([c for c, _ in norm], 2, "domain")
        images = [odometer_word_image(c, k) for c, k in norm]
        _validate_code(images, 2, "range")
        self.rows = tuple(sorted(_merge_rows(norm)))

    def __eq__(self, other):
        return isinstance(other, FullGroupTable) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = ", ".join(f"[{''.join(map(str, c))}]:{k:+d}" for c, k in self.rows)
        return f"FullGroupTable({body})"

    @classmethod
    def identity(cls) -> "FullGroupTable":
        return cls([(Word(()), 0)])

    @classmethod
    def odometer(cls, power: int = 1) -> "FullGroupTable":
        return cls([(Word(()), power)])

    def _check_family(self, other):
        if not isinstance(other, FullGroupTable):
            raise FamilyMismatch("full-group tables only compose with each other")

    def _row_for(self, letters) -> tuple | None:
        for c, k in self.rows:
            if letters[: len(c)] == c:
                return c, k
        return None

    def act_word(self, w: Word) -> Word:
        self.alphabet.check(w.alphabet)
        row = self._row_for(w.letters)
        if row is None:
            raise UnresolvedWord(f"word {w} shorter than resolution depth {self.resolution_depth()}")
        _, k = row
        return Word(odometer_word_image(w.letters, k), self.alphabet)

    def act_point(self, x: BoundaryPoint) -> BoundaryPoint:
        self.alphabet.check(x.alphabet)
        _, k = self._row_for(x.prefix(self.resolution_depth()).letters)
        return _odometer_point_image(x, k)

    def section(self, w: Word) -> "FullGroupTable":
        self.alphabet.check(w.alphabet)
        row = self._row_for(w.letters)
        if row is None:
            raise UnresolvedWord(f"word {w} does not resolve a row")
        _, k = row
        carry = (_word_value(w.letters) + k) >> len(w.letters)
        return FullGroupTable([(Word(()), carry)])

    def compose(self, other) -> "FullGroupTable":
        self._check_family(other)
        out = []

        def refine(c, k):
            image = odometer_word_image(c, k)
            row = self._row_for(image)
            if row is not None:
                out.append((Word(c), k + row[1]))
            else:
                carry = (_word_value(c) + k) >> len(c)
                for b in (0, 1):
                    # letter that maps to image extension b under the carry
                    refine(c + ((b - carry) % 2,), k)

        for c, k in other.rows:
            refine(c, k)
        return FullGroupTable(out)

    def inverse(self) -> "FullGroupTable":
        return FullGroupTable(
            [(Word(odometer_word_image(c, k)), -k) for c, k in self.rows]
        )

    def is_identity(self, budget: int = 512) -> Tri:
        return Tri.YES if all(k == 0 for _, k in self.rows) else Tri.NO

    def resolution_depth(self) -> int:
        return max(len(c) for c, _ in self.rows)

    def identity_like(self) -> "FullGroupTable":
        return FullGroupTable.identity()


def _merge_rows(rows):
    table = {c: k for c, k in rows}
    changed = True
    while changed:
        changed = False
        for c in sorted(table, key=len, reverse=True):
            if not c or c not in table:
                continue
            stem = c[:-1]
            sib = (stem + (0,), stem + (1,))
            if sib[0] in table and sib[1] in table and table[sib[0]] == table[sib[1]]:
                k = table[sib[0]]
                del table[sib[0]], table[sib[1]]
                table[stem] = k
                changed = True
    return list(table.items())


def _odometer_point_image(x: BoundaryPoint, power: int) -> BoundaryPoint:
    """Add ``power`` to an eventually periodic dyadic word, with carry."""
    pre_len, per_len = len(x.preperiod), len(x.period)
    out: list[int] = []
    seen: dict = {}
    carry = power
    n = 0
    while True:
        if n >= pre_len:
            state = (carry, (n - pre_len) % per_len)
            if state in seen:
                start = seen[state]
                return BoundaryPoint(tuple(out[:start]), tuple(out[start:]), x.alphabet)
            seen[state] = n
        total = x.letter_at(n) + carry
        out.append(total & 1)
        carry = total >> 1
        n += 1


# ---------------------------------------------------------------------------
# generator-word syntax ("a*b*a^-1")


def parse_generator_word(text: str) -> tuple[tuple[str, int], ...]:
    word = []
    text = text.strip()
    if text in ("", "1"):
        return ()
    for token in text.split("*"):
        token = token.strip()
        m = re.fullmatch(rf"({GENERATOR_NAME_RE.pattern})(?:\^(-?\d+))?", token)
        if m is None:
            raise ValueError(f"bad generator token {token!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if exp == 0:
            continue
        sign = 1 if exp > 0 else -1
        word.extend((name, sign) for _ in range(abs(exp)))
    return tuple(word)


def format_generator_word(word) -> str:
    return "*".join(name if exp == 1 else f"{name}^-1" for name, exp in word)
