"""Addresses, vertices and level graphs of the Sierpinski gasket.

The gasket is the attractor of F_i(x) = (x + q_i)/2 for the three corners
q_0, q_1, q_2 of a triangle; a word w = w_1...w_m addresses the cell
F_w = F_{w_1} o ... o F_{w_m}.  Every vertex of the level-m graph is
F_w(q_i) for some |w| = m and carries exact barycentric coordinates
(n_0, n_1, n_2) with n_0 + n_1 + n_2 = 2^m, which is what deduplication,
junction detection and canonical ordering run on -- floats never enter.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, LevelCapError

Word = tuple  # letters in {0, 1, 2}

DEFAULT_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])
DEFAULT_LEVEL_CAP = 10


def max_level() -> int:
    """Refinement cap; the SG_MAX_LEVEL environment variable overrides it."""
    raw = os.environ.get("SG_MAX_LEVEL")
    if raw is None:
        return DEFAULT_LEVEL_CAP
    try:
        return int(raw)
    except ValueError as exc:
        raise DomainError(f"SG_MAX_LEVEL must be an integer, got {raw!r}") from exc


def check_word(word) -> Word:
    word = tuple(int(c) for c in word)
    if any(c not in (0, 1, 2) for c in word):
        raise DomainError(f"word letters must be 0, 1 or 2: {word!r}")
    return word


def word_from_string(text: str) -> Word:
    if text == "":
        return ()
    if not text.isdigit():
        raise DomainError(f"malformed word {text!r}")
    return check_word(text)


def word_index(word) -> int:
    """Base-3 rank of a word among words of its length (cell index)."""
    i = 0
    for c in word:
        i = 3 * i + c
    return i


def apply_ifs(word, point, corners=DEFAULT_CORNERS):
    """Image of a planar point under F_w (first letter applied last)."""
    p = np.asarray(point, dtype=float)
    for c in reversed(check_word(word)):
        p = (p + corners[c]) / 2.0
    return p


def vertex_key(word, letter: int, level: int):
    """Exact coordinates of F_w(q_letter) at the given level (|word| <= level)."""
    word = check_word(word)
    m = len(word)
    if not 0 <= int(letter) <= 2:
        raise DomainError(f"corner letter must be 0, 1 or 2: {letter!r}")
    if level < m:
        raise DomainError(f"level {level} below word length {m}")
    n = [0, 0, 0]
    for t, c in enumerate(word, start=1):
        n[c] += 1 << (m - t)
    n[int(letter)] += 1
    shift = level - m
    return (n[0] << shift, n[1] << shift, n[2] << shift)


def _birth_key(key, level):
    n0, n1, n2 = key
    b = level
    while b > 0 and (n0 | n1 | n2) & 1 == 0:
        n0 >>= 1
        n1 >>= 1
        n2 >>= 1
        b -= 1
    return (n0, n1, n2), b


def _descend_prefix(key, b):
    # Unique path of subcells containing the point down to level 1; greedy
    # smallest-letter choice yields the lexicographically smallest word.
    cur = list(key)
    word = []
    for t in range(b, 1, -1):
        half = 1 << (t - 1)
        letter = min(c for c in range(3) if cur[c] >= half)
        word.append(letter)
        cur[letter] -= half
    return word, cur


def resolve_addresses(key, level=None):
    """All (word, letter) addresses of a vertex at its birth level: one for a
    boundary corner, exactly two for a junction point.  Accepts either a
    VertexId or a raw barycentric key with its level."""
    if isinstance(key, VertexId):
        key, level = key.key, key.birth
    elif level is None:
        raise DomainError("a raw barycentric key needs an explicit level")
    key, b = _birth_key(key, level)
    if b == 0:
        return [((), key.index(1))]
    word, cur = _descend_prefix(key, b)
    a, c = (i for i in range(3) if cur[i] == 1)
    base = tuple(word)
    return sorted([(base + (a,), c), (base + (c,), a)])


def canonical_address(key, level):
    """Lexicographically smallest (word, letter) address, taken at birth level."""
    return resolve_addresses(key, level)[0]


def format_address(word, letter) -> str:
    return "".join(str(c) for c in word) + ":" + str(letter)


@dataclass(frozen=True)
class VertexId:
    """A vertex named by its canonical birth address plus exact coordinates."""

    word: Word
    letter: int
    key: tuple  # barycentric numerators at birth level len(word)

    @property
    def birth(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return format_address(self.word, self.letter)


def vertex_id(key, level) -> VertexId:
    bkey, _ = _birth_key(key, level)
    word, letter = canonical_address(key, level)
    return VertexId(word, letter, bkey)


@dataclass(frozen=True)
class EventuallyConstantWord:
    """Infinite word prefix . tail tail tail ... addressing a single point.

    Canonical form strips tail letters off the end of the prefix, so the
    prefix never ends with the tail letter.  Junction points have exactly two
    such addresses; boundary q_i is (), i.
    """

    prefix: Word
    tail: int

    def __post_init__(self):
        prefix = check_word(self.prefix)
        tail = int(self.tail)
        if tail not in (0, 1, 2):
            raise DomainError(f"tail letter must be 0, 1 or 2: {self.tail!r}")
        while prefix and prefix[-1] == tail:
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", tail)

    @classmethod
    def parse(cls, text: str) -> "EventuallyConstantWord":
        head, sep, tail = text.partition(":")
        if not sep or len(tail) != 1:
            raise DomainError(f"expected 'prefix:tail', got {text!r}")
        return cls(word_from_string(head), int(tail) if tail.isdigit() else -1)

    def letter(self, j: int) -> int:
        """1-indexed j-th letter."""
        if j < 1:
            raise DomainError("letter positions are 1-indexed")
        return self.prefix[j - 1] if j <= len(self.prefix) else self.tail

    def truncation(self, k: int) -> Word:
        return tuple(self.letter(j) for j in range(1, k + 1))

    def point(self, corners=DEFAULT_CORNERS):
        return apply_ifs(self.prefix, corners[self.tail], corners)

    def __str__(self) -> str:
        return format_address(self.prefix, self.tail)


@dataclass(frozen=True, eq=False)
class LevelGraph:
    """The graph on V_m: vertices in canonical address order (the three
    boundary corners are always indices 0, 1, 2), cells as index triples in
    word order, and a CSR adjacency for Laplacian sweeps."""

    level: int
    keys: np.ndarray  # (N, 3) int64 numerators, denominator 2**level
    coords: np.ndarray  # (N, 2) float
    cells: np.ndarray  # (3**level, 3) int32
    indptr: np.ndarray
    indices: np.ndarray
    degree: np.ndarray
    interior_mask: np.ndarray
    key_index: dict = field(repr=False)

    @property
    def size(self) -> int:
        return self.keys.shape[0]

    @property
    def boundary(self):
        return np.array([0, 1, 2])

    def index_of(self, word, letter) -> int:
        return self.key_index[vertex_key(word, letter, self.level)]

    def vertex_ids(self):
        return [vertex_id(tuple(k), self.level) for k in self.keys]


def _cell_corner_keys(m: int):
    ncells = 3**m
    base = np.zeros((ncells, 3), dtype=np.int64)
    idx = np.arange(ncells)
    for t in range(1, m + 1):
        digit = (idx // 3 ** (m - t)) % 3
        w = np.int64(1 << (m - t))
        for c in range(3):
            base[:, c] += w * (digit == c)
    keys = np.repeat(base[:, None, :], 3, axis=1)
    for i in range(3):
        keys[:, i, i] += 1
    return keys


@lru_cache(maxsize=None)
def _build_level_graph(m: int) -> LevelGraph:
    keys = _cell_corner_keys(m)
    K = np.int64((1 << m) + 1)
    codes = (keys[..., 0] * K + keys[..., 1]) * K + keys[..., 2]
    uniq, inverse = np.unique(codes.reshape(-1), return_inverse=True)
    n2 = uniq % K
    rest = uniq // K
    triples = np.stack([rest // K, rest % K, n2], axis=1)

    addrs = [canonical_address(tuple(int(x) for x in t), m) for t in triples]
    order = sorted(range(len(addrs)), key=addrs.__getitem__)
    perm = np.empty(len(order), dtype=np.int64)
    perm[order] = np.arange(len(order))
    triples = triples[order]
    cells = perm[inverse].reshape(-1, 3).astype(np.int32)

    n = triples.shape[0]
    expected = (3 ** (m + 1) + 3) // 2
    assert n == expected, (n, expected)

    coords = (triples @ DEFAULT_CORNERS) / float(1 << m)

    # each edge lives in exactly one cell
    pairs = np.concatenate([cells[:, [0, 1]], cells[:, [1, 2]], cells[:, [0, 2]]])
    src = np.concatenate([pairs[:, 0], pairs[:, 1]])
    dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
    o = np.argsort(src, kind="stable")
    indices = dst[o].astype(np.int64)
    degree = np.bincount(src, minlength=n).astype(np.int64)
    indptr = np.concatenate([[0], np.cumsum(degree)]).astype(np.int64)

    interior = np.ones(n, dtype=bool)
    interior[:3] = False

    key_index = {tuple(int(x) for x in t): i for i, t in enumerate(triples)}
    for arr in (triples, coords, cells, indptr, indices, degree, interior):
        arr.setflags(write=False)
    return LevelGraph(m, triples, coords, cells, indptr, indices, degree, interior, key_index)


def build_level_graph(m: int) -> LevelGraph:
    if m < 0:
        raise DomainError(f"level must be nonnegative, got {m}")
    cap = max_level()
    if m > cap:
        raise LevelCapError(f"level {m} exceeds cap {cap} (override with SG_MAX_LEVEL)")
    return _build_level_graph(m)
