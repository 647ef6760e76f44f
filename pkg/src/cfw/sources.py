"""Producers of partial-quotient sequences.

Every source hands out prefixes ``a_1 ... a_n`` on request.  Infinite sources
report ``length`` as ``None``; literal and quasi-periodic sources are finite
and refuse prefixes longer than what they hold.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from cfw.automatic import Dfao
from cfw.errors import ContractError
from cfw.words import FiniteWord


class SequenceSource:
    """Base class; subclasses implement ``_letters(n)``."""

    kind = "abstract"
    length: int | None = None

    def prefix(self, n: int) -> FiniteWord:
        if n < 0:
            raise ContractError(f"prefix length must be non-negative, got {n}")
        if self.length is not None and n > self.length:
            raise ContractError(
                f"{self.kind} source holds {self.length} letters, {n} requested"
            )
        return self._letters(n)

    def _letters(self, n: int) -> FiniteWord:
        raise NotImplementedError


class LiteralSource(SequenceSource):
    kind = "literal"

    def __init__(self, letters: Sequence[int]):
        self.word = FiniteWord(letters)
        self.length = len(self.word)

    def _letters(self, n):
        return self.word[:n]


class AutomaticSource(SequenceSource):
    kind = "automatic"

    def __init__(self, dfao: Dfao):
        self.dfao = dfao
        self._cache = FiniteWord()

    def _letters(self, n):
        if n == 0:
            return FiniteWord()
        if len(self._cache) < n:
            self._cache = self.dfao.prefix(max(n, 2 * len(self._cache)))
        return self._cache[:n]


class EventuallyPeriodicSource(SequenceSource):
    kind = "eventually_periodic"

    def __init__(self, preperiod: Sequence[int], period: Sequence[int]):
        self.preperiod = FiniteWord(preperiod)
        self.period = FiniteWord(period)
        if not self.period:
            raise ContractError("period must be non-empty")

    def _letters(self, n):
        head = self.preperiod[:n]
        rest = n - len(head)
        reps = -(-rest // len(self.period))
        return head + (self.period * reps)[:rest]


@dataclass(frozen=True)
class QuasiPeriodicSpec:
    """``head`` then each ``block`` repeated ``repeat`` times.

    Block ``k`` starts at 1-based index ``n_k``; ``n_0 = len(head) + 1`` and
    ``n_{k+1} = n_k + repeat_k * len(block_k)``.
    """

    head: FiniteWord
    blocks: tuple[tuple[FiniteWord, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "head", FiniteWord(self.head))
        blocks = []
        for k, (block, lam) in enumerate(self.blocks):
            block = FiniteWord(block)
            if not block:
                raise ContractError(f"block {k} is empty")
            if isinstance(lam, bool) or not isinstance(lam, int) or lam < 1:
                raise ContractError(f"block {k}: repeat count {lam!r} must be a positive integer")
            blocks.append((block, lam))
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def starts(self) -> list[int]:
        """1-based ``n_k`` for every block, plus one past the end."""
        out = [len(self.head) + 1]
        for block, lam in self.blocks:
            out.append(out[-1] + lam * len(block))
        return out

    @property
    def repeats(self) -> list[int]:
        return [lam for _, lam in self.blocks]

    def ratio_stream(self) -> list[Fraction]:
        lams = self.repeats
        return [Fraction(b, a) for a, b in zip(lams, lams[1:])]

    def word(self) -> FiniteWord:
        out = self.head
        for block, lam in self.blocks:
            out = out + block * lam
        return out


class QuasiPeriodicSource(SequenceSource):
    kind = "quasiperiodic"

    def __init__(self, spec: QuasiPeriodicSpec):
        self.spec = spec
        self.word = spec.word()
        self.length = len(self.word)

    def _letters(self, n):
        return self.word[:n]
