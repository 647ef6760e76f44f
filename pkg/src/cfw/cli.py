"""Command-line interface: ``cfw {gen,complexity,detect,verify,all}``.

Spec files are JSON documents with a required ``schema_version``.  Reports
are JSON with sorted keys; exact rationals are ``"num/den"`` strings and the
only floats sit under ``diagnostics`` keys.

Exit codes: 0 success, 1 usage or parse error, 2 contract violation (bad
witness, failed exact bound), 3 indeterminate bounds present.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from cfw import __version__
from cfw.automatic import Dfao
from cfw.criteria import DEFAULT_RATIO_CAP, Witness, WitnessChain, detect_chain
from cfw.errors import ArithmeticCapError, CfwError, ContractError, IndeterminateError
from cfw.sources import (
    AutomaticSource,
    EventuallyPeriodicSource,
    LiteralSource,
    QuasiPeriodicSource,
    QuasiPeriodicSpec,
    SequenceSource,
)
from cfw.witness import DEFAULT_GUARD_DEPTH, FAIL, INDETERMINATE, verify
from cfw.words import FactorIndex, FiniteWord

SCHEMA_VERSION = 1
SPEC_TYPES = ("literal", "automatic", "quasiperiodic", "eventually_periodic")

EXIT_OK, EXIT_USAGE, EXIT_CONTRACT, EXIT_INDETERMINATE = 0, 1, 2, 3


class SpecError(CfwError, ValueError):
    """A spec file does not validate; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class SequenceSpec:
    name: str
    type: str
    payload: dict
    witnesses: tuple[Witness, ...] = ()

    def source(self) -> SequenceSource:
        p = self.payload
        if self.type == "literal":
            return LiteralSource(p["letters"])
        if self.type == "automatic":
            return AutomaticSource(p["dfao"])
        if self.type == "eventually_periodic":
            return EventuallyPeriodicSource(p["preperiod"], p["period"])
        return QuasiPeriodicSource(p["quasi"])

    def echo(self) -> dict:
        """The validated spec as plain JSON."""
        out = {"name": self.name, "type": self.type, "schema_version": SCHEMA_VERSION}
        p = self.payload
        if self.type == "literal":
            out["letters"] = list(p["letters"])
        elif self.type == "automatic":
            m: Dfao = p["dfao"]
            out["automaton"] = {
                "base": m.k,
                "initial": m.names[m.initial],
                "transitions": {m.names[s]: [m.names[t] for t in row]
                                for s, row in enumerate(m.transitions)},
                "outputs": {m.names[s]: o for s, o in enumerate(m.outputs)},
            }
        elif self.type == "eventually_periodic":
            out["preperiod"] = list(p["preperiod"])
            out["period"] = list(p["period"])
        else:
            q: QuasiPeriodicSpec = p["quasi"]
            out["head"] = list(q.head)
            out["blocks"] = [{"block": list(b), "repeat": lam} for b, lam in q.blocks]
        if self.witnesses:
            out["witnesses"] = [witness_to_json(w) for w in self.witnesses]
        return out


def _word(value, path: str, allow_empty: bool = True) -> FiniteWord:
    if not isinstance(value, list):
        raise SpecError(path, f"expected a list of positive integers, got {type(value).__name__}")
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, int) or x < 1:
            raise SpecError(f"{path}[{i}]", f"expected a positive integer, got {x!r}")
    if not allow_empty and not value:
        raise SpecError(path, "must be non-empty")
    return FiniteWord(value)


def _field(data: dict, key: str, path: str):
    if key not in data:
        raise SpecError(f"{path}{key}", "missing required field")
    return data[key]


def _automaton(data, path: str) -> Dfao:
    if not isinstance(data, dict):
        raise SpecError(path, "expected an object")
    base = _field(data, "base", f"{path}.")
    if isinstance(base, bool) or not isinstance(base, int) or base < 2:
        raise SpecError(f"{path}.base", f"expected an integer >= 2, got {base!r}")
    initial = _field(data, "initial", f"{path}.")
    transitions = _field(data, "transitions", f"{path}.")
    outputs = _field(data, "outputs", f"{path}.")
    if not isinstance(transitions, dict) or not transitions:
        raise SpecError(f"{path}.transitions", "expected a non-empty object state -> targets")
    if not isinstance(outputs, dict):
        raise SpecError(f"{path}.outputs", "expected an object state -> output")
    if initial not in transitions:
        raise SpecError(f"{path}.initial", f"unknown state {initial!r}")
    for state, row in transitions.items():
        where = f"{path}.transitions.{state}"
        if not isinstance(row, list) or len(row) != base:
            raise SpecError(where, f"expected {base} targets, one per digit")
        for d, target in enumerate(row):
            if target not in transitions:
                raise SpecError(f"{where}[{d}]", f"unknown state {target!r}")
        if state not in outputs:
            raise SpecError(f"{path}.outputs.{state}", "missing output")
    for state, out in outputs.items():
        if state not in transitions:
            raise SpecError(f"{path}.outputs.{state}", "state has no transitions")
        if isinstance(out, bool) or not isinstance(out, int) or out < 1:
            raise SpecError(f"{path}.outputs.{state}", f"output must be a positive integer, got {out!r}")
    return Dfao.from_tables(base, initial, transitions, outputs)


def parse_spec(data) -> SequenceSpec:
    """Validate a decoded spec document."""
    if not isinstance(data, dict):
        raise SpecError("$", "spec must be a JSON object")
    version = _field(data, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise SpecError("schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION}")
    kind = _field(data, "type", "")
    if kind not in SPEC_TYPES:
        raise SpecError("type", f"expected one of {', '.join(SPEC_TYPES)}, got {kind!r}")
    name = data.get("name", kind)
    if not isinstance(name, str) or not name:
        raise SpecError("name", "expected a non-empty string")

    if kind == "literal":
        payload = {"letters": _word(_field(data, "letters", ""), "letters")}
    elif kind == "automatic":
        payload = {"dfao": _automaton(_field(data, "automaton", ""), "automaton")}
    elif kind == "eventually_periodic":
        payload = {
            "preperiod": _word(data.get("preperiod", []), "preperiod"),
            "period": _word(_field(data, "period", ""), "period", allow_empty=False),
        }
    else:
        head = _word(data.get("head", []), "head")
        blocks = _field(data, "blocks", "")
        if not isinstance(blocks, list) or not blocks:
            raise SpecError("blocks", "expected a non-empty list")
        parsed = []
        for k, item in enumerate(blocks):
            where = f"blocks[{k}]"
            if not isinstance(item, dict):
                raise SpecError(where, "expected an object with block and repeat")
            block = _word(_field(item, "block", f"{where}."), f"{where}.block", allow_empty=False)
            lam = _field(item, "repeat", f"{where}.")
            if isinstance(lam, bool) or not isinstance(lam, int) or lam < 1:
                raise SpecError(f"{where}.repeat", f"expected a positive integer, got {lam!r}")
            parsed.append((block, lam))
        payload = {"quasi": QuasiPeriodicSpec(head, tuple(parsed))}

    witnesses = []
    for k, item in enumerate(data.get("witnesses", [])):
        witnesses.append(parse_witness(item, f"witnesses[{k}]"))
    return SequenceSpec(name, kind, payload, tuple(witnesses))


def parse_witness(item, path: str = "witness") -> Witness:
    if not isinstance(item, dict):
        raise SpecError(path, "expected an object with kind, W, U, V")
    kind = _field(item, "kind", f"{path}.")
    if kind not in ("repeat", "mirror"):
        raise SpecError(f"{path}.kind", f"expected repeat or mirror, got {kind!r}")
    return Witness(
        kind,
        _word(item.get("W", []), f"{path}.W"),
        _word(_field(item, "U", f"{path}."), f"{path}.U", allow_empty=False),
        _word(item.get("V", []), f"{path}.V"),
    )


def load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(path, f"cannot read file: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}", f"invalid JSON: {exc.msg}") from None


def load_spec(path: str) -> SequenceSpec:
    return parse_spec(load_json(path))


def frac(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def witness_to_json(w: Witness) -> dict:
    return w.to_json()


def chain_to_json(chain: WitnessChain) -> dict:
    return {
        "kind": chain.kind,
        "ratio_cap": frac(chain.ratio_cap),
        "scanned_prefix": chain.scanned,
        "witness_count": len(chain),
        "witnesses": [w.to_json() for w in chain],
        "sup_v_over_u": None if chain.sup_v_ratio is None else frac(chain.sup_v_ratio),
        "sup_w_over_u": None if chain.sup_w_ratio is None else frac(chain.sup_w_ratio),
        "u_over_n": [frac(x) for x in chain.eps_stream],
        "periodicity_advisory": (
            None if chain.periodicity is None
            else {"preperiod": chain.periodicity[0], "period": chain.periodicity[1],
                  "note": "prefix looks ultimately periodic; finite data cannot certify this"}
        ),
    }


def complexity_section(word: FiniteWord, max_n: int) -> dict:
    if not 1 <= max_n <= len(word):
        raise ContractError(f"max_n={max_n} outside 1..{len(word)}")
    counts = FactorIndex(word).profile(max_n)
    return {
        "prefix_len": len(word),
        "note": "counts on a finite prefix; lower bounds for the infinite word",
        "rows": [{"n": n, "p": p, "p_over_n": frac(Fraction(p, n))}
                 for n, p in enumerate(counts, start=1)],
    }


def _sample(items: list, limit: int | None) -> list[int]:
    """Indices of an evenly spaced sample of ``items``, always including the last."""
    n = len(items)
    if limit is None or n <= limit:
        return list(range(n))
    if limit <= 1:
        return [n - 1]
    return sorted({round(k * (n - 1) / (limit - 1)) for k in range(limit)})


def verification_section(source, witnesses, guard_depth: int, limit: int | None = None):
    from cfw.witness import exponent_fit

    records = []
    for idx in _sample(list(witnesses), limit):
        records.append((idx, verify(source, witnesses[idx], guard_depth)))
    statuses = [r.status for _, r in records]
    section = {
        "guard_depth": guard_depth,
        "records": [dict(r.to_json(), chain_index=idx) for idx, r in records],
        "summary": {
            "verified": len(records),
            "pass": statuses.count("pass"),
            "fail": statuses.count(FAIL),
            "indeterminate": statuses.count(INDETERMINATE),
        },
    }
    diag = {}
    for kind in ("repeat", "mirror"):
        recs = [r for _, r in records if r.witness.kind == kind]
        try:
            diag[f"eps_fit_{kind}"] = exponent_fit(recs)
        except ContractError:
            diag[f"eps_fit_{kind}"] = None
    section["diagnostics"] = diag
    return section, statuses


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cfw", description="Continued-fraction word analysis: generate, detect, verify.")
    parser.add_argument("--version", action="version", version=f"cfw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--spec", required=True, help="sequence spec file (JSON)")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("report", "lines"), default="report")

    def detection(p, max_len=1024):
        p.add_argument("--max-len", type=int, default=max_len)
        p.add_argument("--kind", choices=("repeat", "mirror", "either"), default="either")
        p.add_argument("--ratio-cap", type=_rational, default=DEFAULT_RATIO_CAP)

    p = sub.add_parser("gen", help="emit a prefix of the sequence")
    common(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("complexity", help="factor complexity table of a prefix")
    common(p)
    p.add_argument("--n", type=int, required=True, help="prefix length")
    p.add_argument("--max-n", type=int, help="largest factor length (default: --n)")

    p = sub.add_parser("detect", help="search for a witness chain")
    common(p)
    detection(p)

    p = sub.add_parser("verify", help="certify bounds for witnesses")
    common(p)
    detection(p)
    p.add_argument("--guard-depth", type=int, default=DEFAULT_GUARD_DEPTH)
    p.add_argument("--witness", help="JSON file with one witness (or a list)")
    p.add_argument("--select", type=int, action="append",
                   help="chain index to verify (repeatable; default: all)")

    p = sub.add_parser("all", help="complexity, detection and verification in one report")
    common(p)
    detection(p)
    p.add_argument("--guard-depth", type=int, default=DEFAULT_GUARD_DEPTH)
    p.add_argument("--max-n", type=int, default=64)
    p.add_argument("--verify-limit", type=int, default=32,
                   help="verify an evenly spaced sample of this many chain witnesses")
    return parser


def _emit(report, args, lines: list[str] | None = None) -> None:
    if args.format == "lines" and lines is not None:
        text = "".join(f"{x}\n" for x in lines)
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _header(args, spec: SequenceSpec, params: dict) -> dict:
    return {
        "tool": "cfw",
        "version": __version__,
        "command": args.command,
        "parameters": params,
        "spec": spec.echo(),
    }


def _prefix(source: SequenceSource, n: int) -> FiniteWord:
    if n < 1:
        raise ContractError(f"prefix length must be >= 1, got {n}")
    return source.prefix(n)


def _positive(name: str, value: int, minimum: int = 1) -> None:
    if value < minimum:
        raise ContractError(f"--{name} must be >= {minimum}, got {value}")


def _witnesses_for_verify(args, spec: SequenceSpec, source):
    if args.witness:
        data = load_json(args.witness)
        items = data if isinstance(data, list) else [data]
        return [parse_witness(item, f"witness[{k}]") for k, item in enumerate(items)], None
    if spec.witnesses:
        return list(spec.witnesses), None
    chain = detect_chain(source, args.kind, args.max_len, args.ratio_cap)
    return list(chain), chain


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec)
        source = spec.source()
        if args.command == "gen":
            word = _prefix(source, args.n)
            report = _header(args, spec, {"n": args.n})
            report["prefix"] = list(word)
            _emit(report, args, [str(x) for x in word])
            return EXIT_OK

        if args.command == "complexity":
            word = _prefix(source, args.n)
            max_n = args.n if args.max_n is None else args.max_n
            report = _header(args, spec, {"n": args.n, "max_n": max_n})
            report["complexity"] = complexity_section(word, max_n)
            rows = report["complexity"]["rows"]
            _emit(report, args, [f"{r['n']} {r['p']} {r['p_over_n']}" for r in rows])
            return EXIT_OK

        params = {"kind": args.kind, "max_len": args.max_len, "ratio_cap": frac(args.ratio_cap)}
        if args.command == "detect":
            chain = detect_chain(source, args.kind, args.max_len, args.ratio_cap)
            report = _header(args, spec, params)
            report["chain"] = chain_to_json(chain)
            _emit(report, args, [f"{w.kind} {len(w.W)} {len(w.U)} {len(w.V)}" for w in chain])
            return EXIT_OK

        _positive("guard-depth", args.guard_depth, 0)
        params["guard_depth"] = args.guard_depth
        if args.command == "verify":
            witnesses, chain = _witnesses_for_verify(args, spec, source)
            if args.select:
                for idx in args.select:
                    if not 0 <= idx < len(witnesses):
                        raise ContractError(f"--select {idx} outside 0..{len(witnesses) - 1}")
                witnesses_sel = [witnesses[i] for i in sorted(set(args.select))]
                params["select"] = sorted(set(args.select))
            else:
                witnesses_sel = witnesses
            report = _header(args, spec, params)
            if chain is not None:
                report["chain"] = chain_to_json(chain)
            section, statuses = verification_section(source, witnesses_sel, args.guard_depth)
            report["verification"] = section
        else:
            params["max_n"] = args.max_n
            params["verify_limit"] = args.verify_limit
            chain = detect_chain(source, args.kind, args.max_len, args.ratio_cap)
            word = source.prefix(chain.scanned)
            report = _header(args, spec, params)
            report["complexity"] = complexity_section(word, min(args.max_n, len(word)))
            report["chain"] = chain_to_json(chain)
            section, statuses = verification_section(
                source, list(chain), args.guard_depth, args.verify_limit)
            report["verification"] = section
        _emit(report, args, [f"{r['chain_index']} {r['status']}"
                             for r in report["verification"]["records"]])
        if FAIL in statuses:
            return EXIT_CONTRACT
        if INDETERMINATE in statuses:
            return EXIT_INDETERMINATE
        return EXIT_OK
    except (SpecError, ArithmeticCapError) as exc:
        print(f"cfw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContractError, IndeterminateError, CfwError) as exc:
        print(f"cfw: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
