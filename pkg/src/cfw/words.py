"""Finite words over the positive integers.

Words are immutable tuples of partial quotients.  Positions are 0-based
throughout this module; reports shift them to the 1-based convention used for
partial quotients ``a_1 a_2 ...``.
"""

from __future__ import annotations

import operator
from collections.abc import Iterable, Sequence
from fractions import Fraction

import numpy as np

from cfw.errors import ContractError

__all__ = [
    "FactorIndex",
    "FiniteWord",
    "complexity",
    "complexity_profile",
    "eventual_period",
    "fibonacci_word",
    "find_disjoint_repeat",
    "find_mirror_pair",
    "is_palindrome",
    "mirror",
    "primitive_root",
    "rational_power",
]


class FiniteWord(tuple):
    """A finite sequence of positive integer letters.

    Slicing and concatenation return ``FiniteWord`` again, so factorizations
    such as ``W + U + V + U`` stay in the type.
    """

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        if isinstance(letters, FiniteWord):
            return letters
        out = []
        for pos, x in enumerate(letters):
            if isinstance(x, bool):
                raise ContractError(f"letter {pos} is a bool, expected a positive integer")
            try:
                x = operator.index(x)
            except TypeError:
                raise ContractError(f"letter {pos} is not an integer: {x!r}") from None
            if x < 1:
                raise ContractError(f"letter {pos} is {x}; partial quotients must be >= 1")
            out.append(x)
        return super().__new__(cls, out)

    @classmethod
    def _trusted(cls, letters: Iterable[int]) -> FiniteWord:
        return super().__new__(cls, letters)

    def __getitem__(self, key):
        item = super().__getitem__(key)
        if isinstance(key, slice):
            return FiniteWord._trusted(item)
        return item

    def __add__(self, other):
        return FiniteWord._trusted(tuple.__add__(self, FiniteWord(other)))

    def __radd__(self, other):
        return FiniteWord._trusted(tuple.__add__(FiniteWord(other), self))

    def __mul__(self, k):
        return FiniteWord._trusted(tuple.__mul__(self, k))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"FiniteWord({list(self)!r})"

    @property
    def letters(self) -> tuple[int, ...]:
        return tuple(self)

    def mirror(self) -> FiniteWord:
        return FiniteWord._trusted(reversed(self))

    def is_palindrome(self) -> bool:
        return all(self[i] == self[-1 - i] for i in range(len(self) // 2))


def mirror(w: Sequence[int]) -> FiniteWord:
    """Return the letters of ``w`` in reverse order."""
    return FiniteWord(w).mirror()


def is_palindrome(w: Sequence[int]) -> bool:
    return FiniteWord(w).is_palindrome()


def rational_power(z: Sequence[int], r) -> FiniteWord:
    """Return ``Z^r``: ``[r]`` copies of ``z`` then the prefix of ``z`` of
    length ``(r - [r])|z|``.

    ``r`` is anything ``Fraction`` accepts; ``r * len(z)`` must be an integer.
    """
    z = FiniteWord(z)
    if not z:
        raise ContractError("rational power of the empty word")
    r = Fraction(r)
    if r <= 0:
        raise ContractError(f"exponent must be positive, got {r}")
    total = r * len(z)
    if total.denominator != 1:
        raise ContractError(f"exponent {r} times length {len(z)} is not an integer")
    whole, rest = divmod(int(total), len(z))
    return z * whole + z[:rest]


def primitive_root(z: Sequence[int]) -> FiniteWord:
    """Shortest word ``y`` with ``z == y^k`` for some integer ``k``."""
    z = FiniteWord(z)
    n = len(z)
    for d in range(1, n + 1):
        if n % d == 0 and z[:d] * (n // d) == z:
            return z[:d]
    return z


def fibonacci_word(n: int) -> FiniteWord:
    """First ``n`` letters of the Fibonacci word over {1, 2}.

    Fixed point of the morphism 1 -> 12, 2 -> 1.
    """
    if n < 0:
        raise ContractError("length must be non-negative")
    w = [1]
    while len(w) < n:
        nxt = []
        for x in w:
            nxt.extend((1, 2) if x == 1 else (1,))
        w = nxt
    return FiniteWord._trusted(w[:n])


def eventual_period(w: Sequence[int], min_repeats: int = 3) -> tuple[int, int] | None:
    """Find the smallest period ``P`` such that ``w[R:]`` has period ``P``.

    ``R`` is the shortest such preperiod for that ``P``.  A candidate is only
    accepted when the periodic tail covers at least half of ``w`` and holds
    ``min_repeats`` full periods, so that a short tail does not count.
    Returns ``(R, P)`` or ``None``.  A finite prefix can never certify that
    the infinite word is (not) ultimately periodic; callers treat the answer
    as advisory.
    """
    a = _codes(w)
    n = len(a)
    for p in range(1, n // min_repeats + 1):
        mism = np.flatnonzero(a[:-p] != a[p:])
        r = int(mism[-1]) + 1 if mism.size else 0
        tail = n - r
        if 2 * tail >= n and tail >= min_repeats * p:
            return r, p
    return None


def _codes(w: Sequence[int]) -> np.ndarray:
    """Dense int64 codes preserving letter order (letters may exceed int64)."""
    alphabet = sorted(set(w))
    if alphabet and alphabet[-1] < 2**62 and alphabet[0] >= -(2**62):
        return np.asarray(w, dtype=np.int64)
    rank = {x: i for i, x in enumerate(alphabet)}
    return np.fromiter((rank[x] for x in w), dtype=np.int64, count=len(w))


def _suffix_array(codes: np.ndarray) -> np.ndarray:
    n = len(codes)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, rank = np.unique(codes, return_inverse=True)
    rank = rank.astype(np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        r, s = rank[sa], second[sa]
        step = np.empty(n, dtype=np.int64)
        step[0] = 0
        step[1:] = (r[1:] != r[:-1]) | (s[1:] != s[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa] = np.cumsum(step)
        rank = new_rank
        if rank.max() == n - 1 or k >= n:
            return sa
        k *= 2


def _lcp_kasai(codes: Sequence[int], sa: np.ndarray) -> np.ndarray:
    n = len(codes)
    s = codes.tolist() if isinstance(codes, np.ndarray) else list(codes)
    sa_list = sa.tolist()
    rank = [0] * n
    for i, p in enumerate(sa_list):
        rank[p] = i
    lcp = [0] * n
    h = 0
    for i in range(n):
        if rank[i] > 0:
            j = sa_list[rank[i] - 1]
            while i + h < n and j + h < n and s[i + h] == s[j + h]:
                h += 1
            lcp[rank[i]] = h
            if h:
                h -= 1
        else:
            h = 0
    return np.asarray(lcp, dtype=np.int64)


class FactorIndex:
    """Suffix array with LCP table over a word.

    ``lcp[k]`` is the longest common prefix of the suffixes at ``sa[k-1]`` and
    ``sa[k]``.  All answers are exact; no hashing is involved.  The index is
    read-only after construction.
    """

    def __init__(self, source: Sequence[int]):
        self.source = tuple(source)
        self._codes = _codes(self.source)
        self.sa = _suffix_array(self._codes)
        self.lcp = _lcp_kasai(self._codes, self.sa)
        self.sa.flags.writeable = False
        self.lcp.flags.writeable = False

    def __len__(self) -> int:
        return len(self.source)

    def occurrences(self, x: Sequence[int]) -> list[int]:
        """Sorted start positions of every occurrence of ``x``."""
        x = tuple(x)
        m, n = len(x), len(self.source)
        if m == 0:
            return list(range(n + 1))
        s, sa = self.source, self.sa

        def cmp_at(k):
            p = int(sa[k])
            chunk = s[p : p + m]
            return (chunk > x) - (chunk < x)

        lo, hi = 0, n
        while lo < hi:
            mid = (lo + hi) // 2
            if cmp_at(mid) < 0:
                lo = mid + 1
            else:
                hi = mid
        start = lo
        hi = n
        while lo < hi:
            mid = (lo + hi) // 2
            if cmp_at(mid) <= 0:
                lo = mid + 1
            else:
                hi = mid
        return sorted(int(p) for p in sa[start:lo])

    def distinct_count(self, n: int) -> int:
        """Number of distinct factors of length ``n``."""
        total = len(self.source)
        if not 1 <= n <= total:
            raise ContractError(f"factor length {n} outside 1..{total}")
        return total - n + 1 - int(np.count_nonzero(self.lcp >= n))

    def profile(self, max_n: int) -> list[int]:
        """``[distinct_count(1), ..., distinct_count(max_n)]`` in one pass."""
        total = len(self.source)
        if not 1 <= max_n <= total:
            raise ContractError(f"max_n {max_n} outside 1..{total}")
        hist = np.bincount(np.minimum(self.lcp, max_n), minlength=max_n + 1)
        at_least = np.cumsum(hist[::-1])[::-1]
        return [total - n + 1 - int(at_least[n]) for n in range(1, max_n + 1)]

    def classes(self, n: int) -> list[list[int]]:
        """Position sets (sorted) of every length-``n`` factor occurring twice or more."""
        out = []
        group: list[int] = []
        for k in range(1, len(self.source)):
            if self.lcp[k] >= n:
                if not group:
                    group.append(int(self.sa[k - 1]))
                group.append(int(self.sa[k]))
            elif group:
                out.append(sorted(group))
                group = []
        if group:
            out.append(sorted(group))
        return out

    def repeated_factor(self, n: int) -> tuple[int, int] | None:
        """Smallest ``(i, j)``, ``i < j``, with equal length-``n`` factors at both."""
        pairs = [(c[0], c[1]) for c in self.classes(n)]
        return min(pairs) if pairs else None

    def disjoint_repeat(self, n: int) -> tuple[int, int] | None:
        """Smallest ``(i, j)`` with equal length-``n`` factors and ``j >= i + n``."""
        best = None
        for c in self.classes(n):
            i = c[0]
            j = next((p for p in c if p >= i + n), None)
            if j is not None and (best is None or (i, j) < best):
                best = (i, j)
        return best


def complexity(prefix: Sequence[int], n: int) -> int:
    """Count distinct length-``n`` factors of ``prefix``.

    For an infinite word extending ``prefix`` this is a lower bound on its
    complexity function at ``n``; it never decreases as the prefix grows.
    """
    prefix = FiniteWord(prefix)
    if not 1 <= n <= len(prefix):
        raise ContractError(f"n={n} outside 1..{len(prefix)}")
    return FactorIndex(prefix).distinct_count(n)


def complexity_profile(prefix: Sequence[int], max_n: int) -> list[int]:
    prefix = FiniteWord(prefix)
    return FactorIndex(prefix).profile(max_n)


def find_disjoint_repeat(prefix: Sequence[int], length: int) -> tuple[int, int] | None:
    """Smallest non-overlapping pair of occurrences of a length-``length`` factor."""
    prefix = FiniteWord(prefix)
    if not 1 <= length <= len(prefix):
        raise ContractError(f"length {length} outside 1..{len(prefix)}")
    return FactorIndex(prefix).disjoint_repeat(length)


def find_mirror_pair(prefix: Sequence[int], length: int) -> tuple[int, int] | None:
    """Smallest ``(i, j)`` with ``j >= i + length`` and the factor at ``j`` equal
    to the mirror image of the factor at ``i``."""
    prefix = FiniteWord(prefix)
    n = len(prefix)
    if not 1 <= length <= n:
        raise ContractError(f"length {length} outside 1..{n}")
    # word, separator 0, mirrored word: a factor at j of the word equals the
    # mirror of the factor at i iff it equals the factor at 2n - i - length + 1
    index = FactorIndex(tuple(prefix) + (0,) + tuple(reversed(prefix)))
    best = None
    for c in index.classes(length):
        fwd = [p for p in c if p < n]
        back = sorted(2 * n + 1 - p - length for p in c if p > n)
        if not fwd or not back:
            continue
        i = back[0]
        j = next((p for p in fwd if p >= i + length), None)
        if j is not None and (best is None or (i, j) < best):
            best = (i, j)
    return best
