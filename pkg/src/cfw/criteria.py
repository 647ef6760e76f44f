"""Repetition and mirror-symmetry witnesses on prefixes of sequences.

A witness factors a prefix as ``W U V U`` (kind ``repeat``) or ``W U V Ū``
(kind ``mirror``, ``Ū`` the mirror image of ``U``).  Chains of witnesses with
growing ``|U|`` and bounded ``|V|/|U|``, ``|W|/|U|`` are the finite evidence
this package collects; nothing here claims anything about the infinite word.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from cfw.errors import ContractError, NotFoundError
from cfw.sources import LiteralSource, QuasiPeriodicSpec, SequenceSource
from cfw.words import FactorIndex, FiniteWord, _codes, eventual_period, primitive_root

__all__ = [
    "DEFAULT_RATIO_CAP",
    "QuasiPeriodicReport",
    "QuasiPeriodicRow",
    "QuasiPeriodicSpec",
    "Witness",
    "WitnessChain",
    "detect_chain",
    "find_power_occurrences",
    "pigeonhole_extract",
    "quasi_periodic_witnesses",
]

KINDS = ("repeat", "mirror")
DEFAULT_RATIO_CAP = Fraction(16)


@dataclass(frozen=True)
class Witness:
    kind: str
    W: FiniteWord
    U: FiniteWord
    V: FiniteWord
    info: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"witness kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("W", "U", "V"):
            object.__setattr__(self, name, FiniteWord(getattr(self, name)))
        if not self.U:
            raise ContractError("witness U must be non-empty")

    @property
    def second(self) -> FiniteWord:
        return self.U if self.kind == "repeat" else self.U.mirror()

    def word(self) -> FiniteWord:
        """``W U V U`` or ``W U V Ū``."""
        return self.W + self.U + self.V + self.second

    @property
    def prefix_len(self) -> int:
        return len(self.W) + 2 * len(self.U) + len(self.V)

    @property
    def ratios(self) -> tuple[Fraction, Fraction]:
        """``(|V|/|U|, |W|/|U|)``."""
        u = len(self.U)
        return Fraction(len(self.V), u), Fraction(len(self.W), u)

    def reconstructs(self, word: Sequence[int]) -> bool:
        return tuple(word[: self.prefix_len]) == tuple(self.word())

    def to_json(self) -> dict:
        v_ratio, w_ratio = self.ratios
        return {
            "kind": self.kind,
            "W": list(self.W),
            "U": list(self.U),
            "V": list(self.V),
            "lengths": {"w": len(self.W), "u": len(self.U), "v": len(self.V)},
            # 1-based index of the first letter of each block
            "starts": {
                "U": len(self.W) + 1,
                "V": len(self.W) + len(self.U) + 1,
                "second": len(self.W) + len(self.U) + len(self.V) + 1,
            },
            "prefix_len": self.prefix_len,
            "ratios": {"v_over_u": _frac(v_ratio), "w_over_u": _frac(w_ratio)},
        }

    @classmethod
    def from_json(cls, data: dict) -> Witness:
        return cls(data["kind"], data.get("W", []), data["U"], data.get("V", []))

    def check_against(self, source: SequenceSource | Sequence[int]) -> None:
        """Raise ``ContractError`` unless the witness is a prefix of ``source``."""
        n = self.prefix_len
        if isinstance(source, SequenceSource):
            if source.length is not None and source.length < n:
                raise ContractError(f"source holds {source.length} letters, witness needs {n}")
            word = source.prefix(n)
        else:
            word = tuple(source)
        if len(word) < n or not self.reconstructs(word):
            raise ContractError(f"{self.kind} witness is not a prefix of the source")


@dataclass(frozen=True)
class WitnessChain:
    witnesses: tuple[Witness, ...]
    kind: str
    ratio_cap: Fraction
    scanned: int
    periodicity: tuple[int, int] | None = None
    degenerate: bool = False

    def __post_init__(self):
        us = [len(w.U) for w in self.witnesses]
        if any(b <= a for a, b in zip(us, us[1:])):
            raise ContractError("witness |U| must strictly increase along a chain")

    def __len__(self) -> int:
        return len(self.witnesses)

    def __iter__(self):
        return iter(self.witnesses)

    @property
    def sup_v_ratio(self) -> Fraction | None:
        return max((w.ratios[0] for w in self.witnesses), default=None)

    @property
    def sup_w_ratio(self) -> Fraction | None:
        return max((w.ratios[1] for w in self.witnesses), default=None)

    @property
    def eps_stream(self) -> list[Fraction]:
        """``|U| / N`` per witness, ``N`` the analyzed prefix length."""
        return [Fraction(len(w.U), w.prefix_len) for w in self.witnesses]


def _frac(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _as_source(source) -> SequenceSource:
    return source if isinstance(source, SequenceSource) else LiteralSource(source)


def pigeonhole_extract(prefix: Sequence[int], n: int, c: int) -> Witness:
    """Turn a repeated length-``n`` block in the first ``(c+1)n`` letters into a
    repeat witness with ``|W| + |V| <= (3c+1)|U|`` and ``|U| >= n/3``.

    The two occurrences ``i < j`` are the smallest pair.  If they do not
    overlap, ``U`` is the block and ``V`` the gap.  Otherwise the block is a
    rational power of its shift ``X' = a[i:j]``: writing ``1 + n/|X'|`` as
    ``2x + y`` with ``0 <= y < 2`` gives the square ``(X'^x)^2`` at ``i`` and
    ``V`` is empty.
    """
    prefix = FiniteWord(prefix)
    if n < 1 or c < 2:
        raise ContractError(f"need n >= 1 and c >= 2, got n={n}, c={c}")
    span = (c + 1) * n
    if len(prefix) < span:
        raise ContractError(f"prefix has {len(prefix)} letters, need (c+1)n = {span}")
    window = prefix[:span]
    pair = FactorIndex(window).repeated_factor(n)
    if pair is None:
        raise NotFoundError(f"no length-{n} block repeats within the first {span} letters")
    i, j = pair
    block = window[i : i + n]
    if i + n <= j:
        return Witness("repeat", window[:i], block, window[i + n : j],
                       info={"case": "disjoint", "positions": (i, j)})
    shift = window[i:j]
    exponent = 1 + Fraction(n, len(shift))
    x = math.floor(exponent / 2)
    y = exponent - 2 * x
    return Witness("repeat", window[:i], shift * x, FiniteWord(),
                   info={"case": "overlap", "positions": (i, j), "x": x, "y": y})


def _ceil_div(num: np.ndarray, den: int) -> np.ndarray:
    return -((-num) // den)


def _best_per_length(a: np.ndarray, kind: str, cap: Fraction) -> np.ndarray:
    """``best[N]`` = smallest start ``j`` of the second block over all
    factorizations of ``a[:N]`` of the given kind within the ratio cap, or -1.

    The largest ``|U|`` at ``N`` is then ``N - best[N]``.  Columns ``j`` are
    processed right to left so that the common-extension table of column
    ``j`` is derived from column ``j + 1`` in one vector step.
    """
    L = len(a)
    cp, cq = cap.numerator, cap.denominator
    best = np.full(L + 1, -1, dtype=np.int64)
    ext = np.zeros(L, dtype=np.int64)
    for j in range(L - 1, 0, -1):
        eq = a[:j] == a[j]
        pos = np.arange(j, dtype=np.int64)
        if kind == "repeat":
            # ext[i] = longest common prefix of a[i:] and a[j:], i < j
            ext = np.where(eq, ext[1 : j + 1] + 1, 0)
            gap = j - pos
            u_hi = np.minimum(ext, gap)
            u_lo = np.maximum(_ceil_div(gap * cq, cp + cq), _ceil_div(pos * cq, cp))
        else:
            # ext[e] = longest m with a[j+t] == a[e-t] for t < m, e < j
            shifted = np.concatenate(([0], ext[: j - 1]))
            ext = np.where(eq, shifted + 1, 0)
            u_hi = ext
            u_lo = np.maximum(_ceil_div((pos + 1) * cq, cp + cq), _ceil_div((j - pos - 1) * cq, cp))
        u_lo = np.maximum(u_lo, 1)
        ok = u_lo <= u_hi
        if not ok.any():
            continue
        marks = (np.bincount(u_lo[ok], minlength=j + 2)[: j + 2]
                 - np.bincount(u_hi[ok] + 1, minlength=j + 2)[: j + 2])
        us = np.flatnonzero(np.cumsum(marks) > 0)
        best[j + us] = j
    return best


def _first_block(a: np.ndarray, kind: str, cap: Fraction, j: int, u: int) -> int:
    """Smallest start ``i`` of the first block for second block ``a[j:j+u]``."""
    target = a[j : j + u] if kind == "repeat" else a[j : j + u][::-1]
    lo = max(0, math.ceil(j - (1 + cap) * u))
    hi = min(j - u, math.floor(cap * u))
    if hi < lo:
        raise AssertionError("empty candidate range for a feasible block")
    windows = sliding_window_view(a[lo : hi + u], u)
    hits = np.flatnonzero((windows == target).all(axis=1))
    if not hits.size:
        raise AssertionError("feasible block not found on recheck")
    return lo + int(hits[0])


def detect_chain(
    source: SequenceSource | Sequence[int],
    kind: str = "either",
    max_len: int = 1024,
    ratio_cap=DEFAULT_RATIO_CAP,
) -> WitnessChain:
    """Scan prefix lengths ``N <= max_len`` for witnesses with growing ``|U|``.

    At each ``N`` the factorization of ``a[:N]`` maximizing ``|U|`` (subject
    to ``|V|, |W| <= ratio_cap * |U|``) is found, ties broken by smallest
    ``|W|``; for ``kind="either"`` a repeat wins a tie with a mirror.  It is
    appended when its ``|U|`` beats the last witness.  An empty chain is a
    valid answer.
    """
    if kind not in ("repeat", "mirror", "either"):
        raise ContractError(f"kind must be repeat, mirror or either, got {kind!r}")
    if max_len < 4:
        raise ContractError(f"max_len must be >= 4, got {max_len}")
    cap = Fraction(ratio_cap)
    if cap <= 0:
        raise ContractError(f"ratio_cap must be positive, got {cap}")
    src = _as_source(source)
    L = max_len if src.length is None else min(max_len, src.length)
    word = src.prefix(L)
    a = _codes(word)
    kinds = KINDS if kind == "either" else (kind,)
    best = {k: _best_per_length(a, k, cap) for k in kinds}

    witnesses = []
    last_u = 0
    for N in range(1, L + 1):
        choice = None
        for k in kinds:
            j = int(best[k][N])
            if j >= 0 and (choice is None or N - j > choice[2]):
                choice = (k, j, N - j)
        if choice is None or choice[2] <= last_u:
            continue
        k, j, u = choice
        i = _first_block(a, k, cap, j, u)
        w = Witness(k, word[:i], word[i : i + u], word[i + u : j])
        assert w.reconstructs(word)
        witnesses.append(w)
        last_u = u
    return WitnessChain(tuple(witnesses), kind, cap, L, periodicity=eventual_period(word))


@dataclass(frozen=True)
class QuasiPeriodicRow:
    k: int
    start: int            # 1-based n_k
    block_len: int        # r_k
    repeat: int           # lambda_k
    w_len: int
    u_len: int
    prefix_ok: bool
    u_lower_ok: bool      # (lambda-1) r / 2 <= |U| and lambda r / 4 <= (lambda-1) r / 2
    preconditions: bool
    w_tail_ok: bool | None    # |W| <= n'_0 + r lambda / eps
    w_upper_ok: bool | None   # |W| <= 2 r lambda / eps
    u_vs_w_ok: bool | None    # |U| >= eps |W| / 8


@dataclass(frozen=True)
class QuasiPeriodicReport:
    eps: Fraction
    k0: int | None
    n0_prime: int | None
    rows: tuple[QuasiPeriodicRow, ...]
    ratio_stream: tuple[Fraction, ...]
    ratio_infimum: Fraction | None
    degenerate: bool

    @property
    def all_ok(self) -> bool:
        for r in self.rows:
            if not (r.prefix_ok and r.u_lower_ok):
                return False
            if r.preconditions and not (r.w_tail_ok and r.w_upper_ok and r.u_vs_w_ok):
                return False
        return True


def _growth_start(lams: list[int], eps: Fraction) -> int | None:
    """Smallest ``k0`` with ``lambda_k0 > 2`` and ``lambda_{h+1} >= (1+eps) lambda_h``
    for every ``h >= k0`` in the data."""
    k0 = None
    for h in range(len(lams) - 1, -1, -1):
        if h < len(lams) - 1 and lams[h + 1] < (1 + eps) * lams[h]:
            break
        if lams[h] > 2:
            k0 = h
    return k0


def quasi_periodic_witnesses(
    spec: QuasiPeriodicSpec, eps
) -> tuple[WitnessChain, QuasiPeriodicReport]:
    """Square witnesses ``W_k U_k U_k`` of a quasi-periodic expansion.

    For every block with ``lambda_k > 2``: ``W_k`` is everything before the
    block and ``U_k`` the block repeated ``[lambda_k / 2]`` times.  The
    length bounds on ``W_k`` are only checked at indices where the finite
    data meets their hypotheses: ``k > k0`` where ``lambda`` is above 2 at
    ``k0`` and grows by ``1 + eps`` from there, ``r_k`` is at least every
    earlier block length, and ``n'_0 <= r_k lambda_k / eps``.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ContractError(f"eps must be positive, got {eps}")
    if len(spec.blocks) < 2:
        raise ContractError("need at least two blocks")
    word = spec.word()
    starts = spec.starts
    lams = spec.repeats
    rs = [len(b) for b, _ in spec.blocks]
    k0 = _growth_start(lams, eps)
    n0_prime = starts[k0] if k0 is not None else None

    rows, found = [], []
    for k, (block, lam) in enumerate(spec.blocks):
        if lam <= 2:
            continue
        r = len(block)
        W = word[: starts[k] - 1]
        U = block * (lam // 2)
        wit = Witness("repeat", W, U, FiniteWord(), info={"block": k})
        prefix_ok = wit.reconstructs(word)
        u_lower_ok = 2 * len(U) >= (lam - 1) * r and 2 * (lam - 1) * r >= lam * r
        pre = (
            k0 is not None and k > k0 and r >= max(rs[:k])
            and n0_prime <= Fraction(r * lam) / eps
        )
        if pre:
            w_tail = len(W) <= n0_prime + Fraction(r * lam) / eps
            w_upper = len(W) <= 2 * Fraction(r * lam) / eps
            u_vs_w = len(U) >= eps * len(W) / 8
        else:
            w_tail = w_upper = u_vs_w = None
        rows.append(QuasiPeriodicRow(k, starts[k], r, lam, len(W), len(U), prefix_ok,
                                     u_lower_ok, pre, w_tail, w_upper, u_vs_w))
        found.append(wit)

    chain_items = []
    for wit in found:
        if not chain_items or len(wit.U) > len(chain_items[-1].U):
            chain_items.append(wit)
    roots = {primitive_root(b) for b, _ in spec.blocks}
    degenerate = len(roots) == 1
    periodicity = eventual_period(word)
    chain = WitnessChain(tuple(chain_items), "repeat", Fraction(0), len(word),
                         periodicity=periodicity, degenerate=degenerate or periodicity is not None)
    stream = tuple(spec.ratio_stream())
    report = QuasiPeriodicReport(eps, k0, n0_prime, tuple(rows), stream,
                                 min(stream) if stream else None, chain.degenerate)
    return chain, report


def find_power_occurrences(prefix: Sequence[int], exponent) -> list[tuple[int, FiniteWord]]:
    """Every position ``i`` where some ``U^exponent`` starts, with the longest such ``U``."""
    prefix = FiniteWord(prefix)
    exponent = Fraction(exponent)
    if exponent <= 1:
        raise ContractError(f"exponent must exceed 1, got {exponent}")
    a = _codes(prefix)
    L = len(a)
    best = np.zeros(L, dtype=np.int64)
    u = 1
    while exponent * u <= L:
        total = exponent * u
        if total.denominator == 1:
            need = int(total) - u
            eq = a[:-u] == a[u:]
            n = len(eq)
            idx = np.arange(n)
            stop = np.minimum.accumulate(np.where(eq, n, idx)[::-1])[::-1]
            run = stop - idx
            best[: n][run >= need] = u
        u += 1
    return [(int(i), prefix[i : i + int(best[i])]) for i in np.flatnonzero(best)]
