"""Enumeration of conjugacy classes by cyclically reduced words.

A word is handled as a cyclic sequence of syllables ``(generator, exponent)``
with neighbouring syllables on different generators; exponents of torsion
generators are kept in the symmetric range ``(-k/2, k/2]``. Each cyclic
word is stored in its lexicographically least rotation. Words containing
more than half of a relator are dropped, since their shortening is
enumerated already; classes that are still duplicated are merged
numerically.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from hilbert_lab import const
from hilbert_lab.group.elements import GroupElement, evaluate_word, invert_word, letter, letter_index
from hilbert_lab.group.families import Presentation
from hilbert_lab.utils.errors import ExplosionGuardError, InvalidParameterError
from hilbert_lab.utils.logging import get_logger

logger = get_logger("group.words")

Syllable = Tuple[int, int]

# Matrices of numerically merged classes agree to this relative tolerance.
MERGE_TOL = 1e-8

# Word length of the conjugators tried by the numeric merge.
MERGE_CONJUGATOR_LENGTH = 2


@dataclass(frozen=True)
class ConjugacyClass:
    """Representative of a conjugacy class."""

    word: str
    element: GroupElement

    @property
    def word_length(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class Enumeration:
    """Outcome of an enumeration.

    ``candidates`` counts the reduced cyclic words found, ``merged`` those
    folded into another class after the numeric conjugacy test.
    """

    classes: List[ConjugacyClass]
    max_len: int
    candidates: int
    merged: int
    presentation: Presentation

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)


####################################################################################################
# SYLLABLES
####################################################################################################


def _canonical_exponent(exponent: int, order: Optional[int]) -> int:
    if order is None:
        return exponent
    residue = exponent % order
    return residue - order if residue > order / 2 else residue


def _exponents(order: Optional[int], budget: int) -> List[int]:
    """Allowed syllable exponents of a generator up to a length budget."""
    if order is None:
        span = range(1, budget + 1)
        return [e for k in span for e in (k, -k)]
    return [e for e in range(-(order // 2), order // 2 + 1) if e != 0 and abs(e) <= budget and e > -order / 2]


def _to_letters(syllables: Sequence[Syllable]) -> str:
    return "".join(letter(g, e < 0) * abs(e) for g, e in syllables)


def _cyclic_syllables(word: str, orders: Sequence[Optional[int]]) -> Tuple[Syllable, ...]:
    """Cyclically reduced syllables of a letter word, empty for the identity."""
    syllables: List[List[int]] = []
    for char in word:
        g, e = letter_index(char), -1 if char.isupper() else 1
        if syllables and syllables[-1][0] == g:
            syllables[-1][1] += e
        else:
            syllables.append([g, e])

    changed = True
    while changed and syllables:
        changed = False
        merged: List[List[int]] = []
        for g, e in syllables:
            e = _canonical_exponent(e, orders[g])
            if e == 0:
                changed = True
                continue
            if merged and merged[-1][0] == g:
                merged[-1][1] = _canonical_exponent(merged[-1][1] + e, orders[g])
                changed = True
                if merged[-1][1] == 0:
                    merged.pop()
                continue
            merged.append([g, e])
        if len(merged) > 1 and merged[0][0] == merged[-1][0]:
            first = merged.pop(0)
            merged[-1][1] += first[1]
            changed = True
        syllables = merged
    return tuple((g, e) for g, e in syllables)


def _canonical_rotation(syllables: Tuple[Syllable, ...]) -> Tuple[Syllable, ...]:
    return min(syllables[i:] + syllables[:i] for i in range(len(syllables)))


def _relator_pieces(presentation: Presentation) -> List[Tuple[str, str]]:
    """Pairs ``(piece, replacement)`` with the piece longer than half its relator."""
    pieces = set()
    for relator in presentation.relators:
        for word in (relator, invert_word(relator)):
            normal = _to_letters(_line_syllables(word, presentation.orders))
            size = len(normal)
            for i in range(size):
                rotated = normal[i:] + normal[:i]
                for k in range(size // 2 + 1, size):
                    replacement = _to_letters(_line_syllables(invert_word(rotated[k:]), presentation.orders))
                    pieces.add((rotated[:k], replacement))
    return sorted(pieces, key=lambda pair: (-len(pair[0]), pair))


def _line_syllables(word: str, orders: Sequence[Optional[int]]) -> List[Syllable]:
    """Freely reduced syllables of a (non-cyclic) letter word."""
    syllables: List[Syllable] = []
    for char in word:
        g, e = letter_index(char), -1 if char.isupper() else 1
        if syllables and syllables[-1][0] == g:
            e = _canonical_exponent(syllables.pop()[1] + e, orders[g])
            if e == 0:
                continue
        syllables.append((g, _canonical_exponent(e, orders[g])))
    return syllables


def _is_shortenable(letters: str, pieces: List[Tuple[str, str]]) -> bool:
    doubled = letters + letters
    for piece, replacement in pieces:
        if len(piece) > len(letters) or len(replacement) >= len(piece):
            continue
        if piece in doubled[: len(letters) + len(piece) - 1]:
            return True
    return False


####################################################################################################
# ENUMERATION
####################################################################################################


def count_sequences(orders: Sequence[Optional[int]], max_len: int) -> int:
    """Number of linear syllable sequences of length at most ``max_len``."""
    rank = len(orders)
    # ending[L][g]: sequences of length L whose last syllable is on generator g.
    ending = np.zeros((max_len + 1, rank), dtype=float)
    for length in range(1, max_len + 1):
        for g, order in enumerate(orders):
            total = 0.0
            for e in _exponents(order, length):
                rest = length - abs(e)
                total += 1.0 if rest == 0 else ending[rest].sum() - ending[rest, g]
            ending[length, g] = total
    return int(ending.sum())


def _extend(
    prefix: List[Syllable],
    length: int,
    max_len: int,
    orders: Sequence[Optional[int]],
    pieces: List[Tuple[str, str]],
    out: Set[Tuple[Syllable, ...]],
) -> None:
    word = tuple(prefix)
    if len(word) == 1 or word[0][0] != word[-1][0]:
        if _canonical_rotation(word) == word and not _is_shortenable(_to_letters(word), pieces):
            out.add(word)
    for g, order in enumerate(orders):
        if g == prefix[-1][0]:
            continue
        for e in _exponents(order, max_len - length):
            # A syllable below the first one starts a smaller rotation.
            if (g, e) < prefix[0]:
                continue
            prefix.append((g, e))
            _extend(prefix, length + abs(e), max_len, orders, pieces, out)
            prefix.pop()


def _words_from(
    first: Syllable,
    max_len: int,
    orders: Sequence[Optional[int]],
    pieces: List[Tuple[str, str]],
) -> Set[Tuple[Syllable, ...]]:
    out: Set[Tuple[Syllable, ...]] = set()
    _extend([first], abs(first[1]), max_len, orders, pieces, out)
    return out


def reduced_words(rank: int, max_len: int) -> List[str]:
    """Freely reduced letter words of length at most ``max_len``, the empty word first."""
    letters = [letter(i, inverse) for i in range(rank) for inverse in (False, True)]
    words = [""]
    frontier = [""]
    for _ in range(max_len):
        frontier = [w + x for w in frontier for x in letters if not w or w[-1] != x.swapcase()]
        words.extend(frontier)
    return words


def _rotations(word: str, generators: Sequence[GroupElement]) -> np.ndarray:
    return np.stack([evaluate_word(generators, word[i:] + word[:i]).matrix for i in range(len(word))])


def _conjugate(targets: np.ndarray, candidates: np.ndarray, H: np.ndarray, H_inv: np.ndarray) -> bool:
    """Whether some ``h c h⁻¹`` equals ``±t`` for ``h`` in ``H``, ``c`` in candidates, ``t`` in targets."""
    images = np.einsum("hab,rbc,hcd->hrad", H, candidates, H_inv)[:, :, None]
    scale = MERGE_TOL * max(1.0, float(np.max(np.linalg.norm(targets, axis=(1, 2)))))
    gap = np.minimum(
        np.linalg.norm(images - targets, axis=(-2, -1)),
        np.linalg.norm(images + targets, axis=(-2, -1)),
    )
    return bool(np.any(gap < scale))


def merge_conjugate_classes(
    classes: List[ConjugacyClass], generators: Sequence[GroupElement]
) -> Tuple[List[ConjugacyClass], int]:
    """Fold classes that are conjugate by a rotation of their words and a short element.

    Classes ``g`` and ``g'`` are merged when ``h ρ h⁻¹ = ±ρ'`` for cyclic
    rotations ``ρ`` and ``ρ'`` of their words and ``h`` of word length at
    most ``MERGE_CONJUGATOR_LENGTH``. Only classes with equal ``|tr g|`` and
    ``|tr g⁻¹|`` are compared; merges are transitive and keep the shortest
    word.
    """
    if not classes:
        return [], 0
    conjugators = reduced_words(len(generators), MERGE_CONJUGATOR_LENGTH)
    H = np.stack([evaluate_word(generators, w).matrix for w in conjugators])
    H_inv = np.linalg.inv(H)

    traces = np.array([abs(np.trace(c.element.matrix)) for c in classes])
    inverse_traces = np.array([abs(np.trace(np.linalg.inv(c.element.matrix))) for c in classes])
    order = np.argsort(traces, kind="stable")

    parent = list(range(len(classes)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    rotations: Dict[int, np.ndarray] = {}

    def rotations_of(i: int) -> np.ndarray:
        if i not in rotations:
            rotations[i] = _rotations(classes[i].word, generators)
        return rotations[i]

    for pos, i in enumerate(order):
        for j in order[pos + 1 :]:
            if traces[j] - traces[i] > MERGE_TOL * max(1.0, traces[i]):
                break
            if abs(inverse_traces[j] - inverse_traces[i]) > MERGE_TOL * max(1.0, inverse_traces[i]):
                continue
            if find(i) == find(j):
                continue
            if _conjugate(rotations_of(i), rotations_of(j), H, H_inv):
                parent[find(j)] = find(i)

    members: Dict[int, List[ConjugacyClass]] = {}
    for i, c in enumerate(classes):
        members.setdefault(find(i), []).append(c)
    kept = [min(group, key=lambda c: (c.word_length, c.word)) for group in members.values()]
    kept.sort(key=lambda c: (c.word_length, c.word))
    return kept, len(classes) - len(kept)


def enumerate_conjugacy_classes(
    generators: Sequence[GroupElement],
    max_len: int,
    presentation: Optional[Presentation] = None,
    threads: int = 1,
) -> Enumeration:
    """Nontrivial conjugacy classes with a representative of word length at most ``max_len``.

    Parameters
    ----------
    generators : Sequence[GroupElement]
        The generators.
    max_len : int
        The maximal word length, at most 16; 0 gives no classes.
    presentation : Optional[Presentation]
        Generator orders and relators; without it the group is treated as
        free and only the numeric merge removes duplicates.
    threads : int
        Worker threads, one task per first syllable.

    Returns
    -------
    Enumeration
        The classes sorted by word length then word; a word and its inverse
        are distinct classes unless they are conjugate.

    Raises
    ------
    ExplosionGuardError
        If ``max_len`` exceeds 16 or the candidate count would exceed 10⁷.

    """
    if max_len < 0:
        msg = f"Maximal word length must be non-negative, got {max_len}"
        raise InvalidParameterError(msg)
    if presentation is None:
        presentation = Presentation.free(len(generators))
    if presentation.rank != len(generators):
        msg = f"Presentation has {presentation.rank} generators, {len(generators)} given"
        raise InvalidParameterError(msg)
    if max_len > const.MAX_WORD_LENGTH:
        msg = f"Word length {max_len} exceeds the limit {const.MAX_WORD_LENGTH}"
        raise ExplosionGuardError(msg)

    if max_len == 0:
        return Enumeration([], 0, 0, 0, presentation)

    orders = presentation.orders
    estimate = count_sequences(orders, max_len)
    if estimate > const.MAX_ENUMERATION:
        msg = f"Enumeration up to length {max_len} would visit about {estimate:.2e} words"
        raise ExplosionGuardError(msg, {"estimate": estimate})

    pieces = _relator_pieces(presentation)
    firsts = [(g, e) for g, order in enumerate(orders) for e in _exponents(order, max_len)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        chunks = list(executor.map(lambda first: _words_from(first, max_len, orders, pieces), firsts))
    words: Dict[str, Tuple[Syllable, ...]] = {}
    for chunk in chunks:
        for syllables in chunk:
            words[_to_letters(syllables)] = syllables

    classes = [ConjugacyClass(w, evaluate_word(generators, w)) for w in sorted(words, key=lambda w: (len(w), w))]
    kept, merged = merge_conjugate_classes(classes, generators)
    logger.info(
        f"Enumerated {len(kept)} classes up to length {max_len} "
        f"({len(classes)} reduced words, {merged} merged numerically)"
    )
    return Enumeration(kept, max_len, len(classes), merged, presentation)


def cyclic_normal_form(word: str, presentation: Presentation) -> str:
    """Canonical cyclic representative of a word, empty for the identity."""
    syllables = _cyclic_syllables(word, presentation.orders)
    return _to_letters(_canonical_rotation(syllables)) if syllables else ""
