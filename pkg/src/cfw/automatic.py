"""k-automatic sequences of partial quotients.

A deterministic finite automaton with output reads the base-k digits of the
index ``ell >= 1``, most significant digit first and without leading zeros,
and emits the output attached to the state it ends in.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from cfw.errors import ContractError
from cfw.words import FiniteWord


@dataclass(frozen=True)
class Dfao:
    """Automaton with output over base ``k``.

    States are the integers ``0 .. len(outputs) - 1``; ``transitions[s][d]``
    is the state reached from ``s`` on digit ``d``.  ``names`` optionally
    keeps the labels used in a spec file.
    """

    k: int
    initial: int
    transitions: tuple[tuple[int, ...], ...]
    outputs: tuple[int, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 2:
            raise ContractError(f"base must be an integer >= 2, got {self.k!r}")
        nstates = len(self.outputs)
        if nstates == 0:
            raise ContractError("automaton has no states")
        if len(self.transitions) != nstates:
            raise ContractError(
                f"{len(self.transitions)} transition rows for {nstates} states"
            )
        if not 0 <= self.initial < nstates:
            raise ContractError(f"initial state {self.initial} out of range")
        for s, row in enumerate(self.transitions):
            if len(row) != self.k:
                raise ContractError(f"state {s}: {len(row)} transitions, expected {self.k}")
            for d, t in enumerate(row):
                if not 0 <= t < nstates:
                    raise ContractError(f"state {s}, digit {d}: target {t} out of range")
        for s, out in enumerate(self.outputs):
            if isinstance(out, bool) or not isinstance(out, int) or out < 1:
                raise ContractError(f"state {s}: output {out!r} is not a positive integer")
        if self.names and len(self.names) != nstates:
            raise ContractError("names must label every state")

    @classmethod
    def from_tables(
        cls,
        k: int,
        initial: str,
        transitions: Mapping[str, Sequence[str]],
        outputs: Mapping[str, int],
    ) -> Dfao:
        """Build from labelled tables, as found in spec files."""
        names = tuple(transitions)
        index = {name: i for i, name in enumerate(names)}
        missing = set(outputs) ^ set(names)
        if missing:
            raise ContractError(f"states without both transitions and output: {sorted(missing)}")
        if initial not in index:
            raise ContractError(f"unknown initial state {initial!r}")
        rows = []
        for name in names:
            row = []
            for d, target in enumerate(transitions[name]):
                if target not in index:
                    raise ContractError(f"state {name!r}, digit {d}: unknown target {target!r}")
                row.append(index[target])
            rows.append(tuple(row))
        return cls(
            k=k,
            initial=index[initial],
            transitions=tuple(rows),
            outputs=tuple(outputs[name] for name in names),
            names=names,
        )

    def term(self, ell: int) -> int:
        """The partial quotient ``a_ell``."""
        if ell < 1:
            raise ContractError(f"index must be >= 1, got {ell}")
        digits = []
        while ell:
            ell, d = divmod(ell, self.k)
            digits.append(d)
        state = self.initial
        for d in reversed(digits):
            state = self.transitions[state][d]
        return self.outputs[state]

    def prefix(self, n: int) -> FiniteWord:
        """``a_1 ... a_n``."""
        if n < 1:
            raise ContractError(f"prefix length must be >= 1, got {n}")
        # state after reading the digits of ell; ell*k + d extends ell by one digit
        states = [0] * (n + 1)
        out = []
        for ell in range(1, n + 1):
            if ell < self.k:
                s = self.transitions[self.initial][ell]
            else:
                s = self.transitions[states[ell // self.k]][ell % self.k]
            states[ell] = s
            out.append(self.outputs[s])
        return FiniteWord._trusted(out)


def term(m: Dfao, ell: int) -> int:
    return m.term(ell)


def prefix(m: Dfao, n: int) -> FiniteWord:
    return m.prefix(n)


def thue_morse() -> Dfao:
    """``a_ell = 1 + (binary digit sum of ell mod 2)``."""
    return Dfao.from_tables(2, "even", {"even": ["even", "odd"], "odd": ["odd", "even"]},
                            {"even": 1, "odd": 2})


def period_doubling() -> Dfao:
    """``a_ell = 1 + (2-adic valuation of ell mod 2)``."""
    return Dfao.from_tables(2, "even", {"even": ["odd", "even"], "odd": ["even", "even"]},
                            {"even": 1, "odd": 2})


def constant(value: int = 1, k: int = 2) -> Dfao:
    return Dfao(k=k, initial=0, transitions=((0,) * k,), outputs=(value,))
