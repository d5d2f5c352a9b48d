"""Command-line front end.

Exit status: 0 when every check passes, 1 when a counterexample is found,
2 for usage and parse errors.  Reports are deterministic for a fixed
``--seed``; random draws use numpy's PCG64 generator via ``default_rng``.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import warnings
from dataclasses import dataclass
from math import gcd
from typing import Callable, Sequence

import numpy as np

from .bisets import BisetError, BisetSemiring, CounterexampleError, HBiset, height_profile
from .families import STANDARD_FAMILY, SpecError, multiplicative_order, parse_group_spec
from .fields import is_prime, parse_ring
from .groups import DEFAULT_ELEMENT_BUDGET, GroupError, Permutation
from .kummer import kum1_classify, kummer_verdict, p41_equivalence_sweep
from .matrix_model import pattern_dimension, phi_pattern, verify_main_isomorphism
from .newton import char2_example_suite, full_newton_suite, newton_suite
from .prime_degree import affine_instance, prime_classify, verify_orbit_products, verify_quotient_isomorphism

EXIT_PASS, EXIT_COUNTEREXAMPLE, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# expressions ------------------------------------------------------------------------
#
#   expr  := term ('+' term)*
#   term  := unary ('*' unary)*
#   unary := '~' unary | power
#   power := atom ('^' exponent)*
#   atom  := 'c' INT | 'H' | 'G' | '0' | '(' expr ')' | 'height(' element ')'
#
# An element is cycle notation such as (0 1 2 3) or '#' followed by an
# element index.  height(g) is an integer; it may stand alone or as an
# exponent.

_TOKEN = re.compile(r"\s*(?:(height)\s*\(|(c\d+)|(\d+)|([+*^~()HG#]))")


class ExprError(UsageError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class HeightValue:
    g: int
    height: int


class _Parser:
    def __init__(self, text: str, semiring: BisetSemiring):
        self.text = text
        self.pos = 0
        self.sr = semiring

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch: str) -> None:
        if self._peek() != ch:
            raise ExprError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def parse(self):
        value = self.expr()
        if self._peek():
            raise ExprError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return value

    def _biset(self, value, at: int) -> HBiset:
        if not isinstance(value, HBiset):
            raise ExprError("height(...) is an integer, not a biset", at)
        return value

    def expr(self):
        at = self.pos
        value = self.term()
        while self._peek() == "+":
            self.pos += 1
            rhs = self.term()
            value = self._biset(value, at) | self._biset(rhs, at)
        return value

    def term(self):
        at = self.pos
        value = self.unary()
        while self._peek() == "*":
            self.pos += 1
            rhs = self.unary()
            value = self._biset(value, at) * self._biset(rhs, at)
        return value

    def unary(self):
        if self._peek() == "~":
            at = self.pos
            self.pos += 1
            return ~self._biset(self.unary(), at)
        return self.power()

    def power(self):
        at = self.pos
        value = self.atom()
        while self._peek() == "^":
            self.pos += 1
            self._skip()
            m = re.match(r"\d+", self.text[self.pos :])
            if m:
                exp = int(m.group())
                self.pos += m.end()
            elif self.text.startswith("height", self.pos):
                exp = self.atom().height
            else:
                raise ExprError("expected an exponent", self.pos)
            value = self._biset(value, at) ** exp
        return value

    def atom(self):
        self._skip()
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            raise ExprError("expected a class, '(' or height(...)", self.pos)
        start = self.pos
        if m.group(1):
            self.pos = m.end()
            g = self._element()
            self._expect(")")
            return HeightValue(g, height_profile(self.sr, g).height)
        if m.group(2):
            c = int(m.group(2)[1:])
            if c >= self.sr.n_classes:
                raise ExprError(f"class c{c} does not exist ({self.sr.n_classes} classes)", start)
            self.pos = m.end()
            return self.sr.atom(c)
        if m.group(3):
            if m.group(3) != "0":
                raise ExprError("only 0 (the empty biset) may appear as a bare number", start)
            self.pos = m.end()
            return self.sr.zero
        tok = m.group(4)
        self.pos = m.end()
        if tok == "H":
            return self.sr.one
        if tok == "G":
            return self.sr.full
        if tok == "(":
            value = self.expr()
            self._expect(")")
            return value
        raise ExprError(f"unexpected {tok!r}", start)

    def _element(self) -> int:
        self._skip()
        G = self.sr.group
        if self._peek() == "#":
            m = re.match(r"#\s*(\d+)", self.text[self.pos :])
            if not m or int(m.group(1)) >= G.order:
                raise ExprError("bad element index", self.pos)
            self.pos += m.end()
            return int(m.group(1))
        m = re.match(r"(\s*\([\d\s]*\))+", self.text[self.pos :])
        if not m:
            raise ExprError("expected an element in cycle notation or #index", self.pos)
        at = self.pos
        self.pos += m.end()
        return parse_element(m.group(), self.sr, at)


def parse_element(text: str, semiring: BisetSemiring, position: int = 0) -> int:
    """Element index from ``#i`` or cycle notation like ``(0 1 2 3)``."""
    G = semiring.group
    text = text.strip()
    if text.startswith("#") or text.isdigit():
        i = int(text.lstrip("#"))
        if not 0 <= i < G.order:
            raise ExprError(f"element index {i} outside 0..{G.order - 1}", position)
        return i
    cycles = [[int(x) for x in body.split()] for body in re.findall(r"\(([^()]*)\)", text)]
    if not re.fullmatch(r"(\s*\([\d\s]*\))+", text):
        raise ExprError(f"bad element {text!r}", position)
    try:
        return G.index_of(Permutation.from_cycles([c for c in cycles if c], G.degree))
    except (GroupError, ValueError) as exc:
        raise ExprError(str(exc), position) from None


def evaluate(expression: str, semiring: BisetSemiring):
    return _Parser(expression, semiring).parse()


# reports ------------------------------------------------------------------------------


def _semiring(args) -> BisetSemiring:
    inst = parse_group_spec(args.group, point=args.point, budget=args.max_elements)
    return BisetSemiring.from_instance(inst)


def _group_header(sr: BisetSemiring) -> dict:
    return {
        "group": sr.name,
        "order": sr.group.order,
        "degree": sr.group.degree,
        "subgroup_order": sr.subgroup.order,
        "index": sr.index,
    }


def _biset_dict(s: HBiset) -> dict:
    return {"classes": s.class_set, "size": s.size, "dimension": pattern_dimension(s) if s else 0}


def _emit(args, s: HBiset) -> None:
    if args.emit_pattern:
        with open(args.emit_pattern, "w", encoding="ascii") as fh:
            fh.write(phi_pattern(s).to_text())


def cmd_double_cosets(args) -> tuple[dict, int]:
    sr = _semiring(args)
    G = sr.group
    classes = []
    for c, rep in enumerate(sr.table.representatives):
        classes.append(
            {
                "class": c,
                "representative": G.format_element(rep),
                "size": sr.table.sizes[c],
                "dimension": pattern_dimension(sr.atom(c)),
                "inverse": sr.class_inverses[c],
            }
        )
    report = {**_group_header(sr), "classes": classes, "product_table": sr.class_product_table()}
    return report, EXIT_PASS


def cmd_biset(args) -> tuple[dict, int]:
    sr = _semiring(args)
    value = evaluate(args.expression, sr)
    report = {**_group_header(sr), "expression": args.expression}
    if isinstance(value, HeightValue):
        report["height"] = height_profile(sr, value.g).as_dict()
        report["height"]["g"] = sr.group.format_element(value.g)
        return report, EXIT_PASS
    r = max(sr.index - 1, 0)
    verdict = kummer_verdict(value, r).as_dict() if value else None
    report["value"] = {**_biset_dict(value), "is_subgroup": value.is_subgroup(), "kummer": verdict}
    _emit(args, value)
    return report, EXIT_PASS


def cmd_height(args) -> tuple[dict, int]:
    sr = _semiring(args)
    G = sr.group
    targets = [parse_element(args.element, sr)] if args.element else range(G.order)
    profiles = []
    for g in targets:
        d = height_profile(sr, g).as_dict()
        d["g"] = G.format_element(g)
        profiles.append(d)
    return {**_group_header(sr), "profiles": profiles}, EXIT_PASS


def _class_list(text: str, sr: BisetSemiring) -> HBiset:
    try:
        classes = [int(x.strip().lstrip("c")) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad class list {text!r}") from None
    if any(not 0 <= c < sr.n_classes for c in classes):
        raise UsageError(f"class index outside 0..{sr.n_classes - 1}")
    return sr.biset(classes)


def cmd_kummer_check(args) -> tuple[dict, int]:
    sr = _semiring(args)
    s = _class_list(args.classes, sr)
    r = sr.index - 1 if args.r is None else args.r
    if not 0 <= r <= sr.index:
        raise UsageError(f"--r must lie in 0..{sr.index}")
    report = {**_group_header(sr), "verdict": kummer_verdict(s, r).as_dict()}
    if len(s.class_set) == 1 and sr.index >= 2 and r == sr.index - 1 and report["verdict"]["kummer"]:
        report["classification"] = kum1_classify(s)
    _emit(args, s)
    return report, EXIT_PASS


def cmd_prime_classify(args) -> tuple[dict, int]:
    if args.p < 3 or not is_prime(args.p):
        raise UsageError(f"--p {args.p} must be an odd prime")
    if args.t is not None and multiplicative_order(args.t, args.p) <= 1:
        raise UsageError(f"--t {args.t} must have order > 1 mod {args.p}")
    report = prime_classify(args.p, args.t)
    return report, EXIT_COUNTEREXAMPLE if report.get("mismatches") else EXIT_PASS


def _newton_single(args) -> dict:
    ring = parse_ring(args.ring)
    if ring.name not in ("ZZ",) and not ring.name.startswith("GF"):
        raise UsageError("the randomized suite runs over int or gf:q")
    if args.n < 1 or args.r < 1:
        raise UsageError("--n and --r must be positive")
    return newton_suite(args.n, args.r, ring, trials=args.trials, seed=args.seed)


def cmd_newton_verify(args) -> tuple[dict, int]:
    report = _newton_single(args)
    report["seed"] = args.seed
    return report, EXIT_COUNTEREXAMPLE if report["failed"] else EXIT_PASS


def _family(args) -> list[BisetSemiring]:
    specs = [args.group] if args.group else list(STANDARD_FAMILY)
    return [
        BisetSemiring.from_instance(parse_group_spec(s, point=args.point, budget=args.max_elements)) for s in specs
    ]


def _suite_main(args) -> dict:
    rng = np.random.default_rng(args.seed)
    checks = []
    for sr in _family(args):
        res = verify_main_isomorphism(sr, rng=rng)
        bad_dims = [
            s.class_set
            for s in sr.all_bisets()
            if phi_pattern(s).count() != sr.index * s.size // sr.subgroup.order
        ]
        res["dimension_failures"] = bad_dims
        res["ok"] = not res["failures"] and not bad_dims
        checks.append(res)
    return {"suite": "main", "seed": args.seed, "checks": checks}


def _suite_newton(args) -> dict:
    if args.n is not None or args.r is not None:
        if args.n is None or args.r is None:
            raise UsageError("give both --n and --r, or neither")
        res = _newton_single(args)
        res["ok"] = res["failed"] == 0
        return {"suite": "newton", "seed": args.seed, "checks": [res]}
    full = full_newton_suite(trials=args.trials, seed=args.seed)
    checks = [{**c, "ok": c["failed"] == 0} for c in full["configs"]]
    checks.append({"check": "classical", **full["classical"], "ok": full["classical"]["failed"] == 0})
    char2 = char2_example_suite()
    checks.append({"check": "char2-families", "results": char2["checks"], "ok": char2["ok"]})
    return {"suite": "newton", "seed": args.seed, "checks": checks}


def _suite_kummer(args) -> dict:
    semirings = _family(args)
    sweep = p41_equivalence_sweep(semirings, max_r=6)
    checks = [{"check": "equivalence", "checks": sweep["checks"], "mismatches": sweep["mismatches"], "ok": sweep["ok"]}]
    for sr in semirings:
        n = sr.index
        if n < 2:
            continue
        passing = []
        for c in range(sr.n_classes):
            s = sr.atom(c)
            if kummer_verdict(s, n - 1).kummer:
                passing.append(kum1_classify(s))
        expected = (
            sorted(c for c in range(sr.n_classes) if sr.table.sizes[c] == 1 and _generates(sr, c))
            if sr.subgroup.order == 1
            else []
        )
        found = sorted(rep["classes"][0] for rep in passing)
        checks.append({"check": "classification", "group": sr.name, "passing": found, "ok": found == expected})
    return {"suite": "kummer-sweep", "checks": checks}


def _generates(sr: BisetSemiring, c: int) -> bool:
    g = sr.table.representatives[c]
    return sr.group.element_order(g) == sr.group.order


def _suite_prime(args) -> dict:
    checks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for p in (3, 5, 7, 11, 13):
            for t in range(2, p):
                r = multiplicative_order(t, p)
                # one multiplier per subgroup <t>
                if r <= 1 or any(pow(t, e, p) < t for e in range(1, r) if gcd(e, r) == 1):
                    continue
                inst, model = affine_instance(p, t)
                sr = BisetSemiring.from_instance(inst)
                prod = verify_orbit_products(model, sr)
                quo = verify_quotient_isomorphism(model, sr)
                checks.append(
                    {
                        "p": p,
                        "t": t,
                        "r": r,
                        "product_mismatches": prod["mismatches"],
                        "quotient_failures": quo["failures"],
                        "ok": not prod["mismatches"] and not quo["failures"],
                    }
                )
    s5 = prime_classify(5)
    checks.append({"check": "symmetric:5", "dims": s5["dims"], "ok": s5["dims"] == [4]})
    return {"suite": "prime", "checks": checks}


_SUITES: dict[str, Callable] = {
    "main": _suite_main,
    "newton": _suite_newton,
    "kummer-sweep": _suite_kummer,
    "prime": _suite_prime,
}


def cmd_verify(args) -> tuple[dict, int]:
    report = _SUITES[args.suite](args)
    report["passed"] = sum(1 for c in report["checks"] if c["ok"])
    report["failed"] = sum(1 for c in report["checks"] if not c["ok"])
    return report, EXIT_COUNTEREXAMPLE if report["failed"] else EXIT_PASS


# rendering ---------------------------------------------------------------------------------


def _scalar(value) -> str:
    return value if isinstance(value, str) else json.dumps(value)


def render_text(report: dict) -> str:
    """Indented key: value lines; lists without dicts stay on one line."""
    lines: list[str] = []

    def emit(key: str, value, depth: int) -> None:
        pad = "  " * depth
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            for k, v in value.items():
                emit(str(k), v, depth + 1)
        elif isinstance(value, list) and any(isinstance(v, dict) for v in value):
            lines.append(f"{pad}{key}:")
            for i, v in enumerate(value):
                emit(f"[{i}]", v, depth + 1)
        else:
            lines.append(f"{pad}{key}: {_scalar(value)}")

    for k, v in report.items():
        emit(str(k), v, 0)
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    return render_text(report)


# argument parsing ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for numpy's PCG64 generator")
    common.add_argument("--emit-pattern", metavar="FILE", help="write the 0/1 span pattern of the result")
    common.add_argument("--max-elements", type=int, default=DEFAULT_ELEMENT_BUDGET, help="group order cap")
    common.add_argument("--point", type=int, default=0, help="H is the stabilizer of this point")

    parser = argparse.ArgumentParser(prog="bisetalg", description="Double cosets, bisets and span patterns.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("double-cosets", parents=[common], help="class table with sizes and dimensions")
    p.add_argument("--group", required=True)
    p.set_defaults(run=cmd_double_cosets)

    p = sub.add_parser("biset", parents=[common], help="evaluate a biset expression")
    p.add_argument("--group", required=True)
    p.add_argument("expression")
    p.set_defaults(run=cmd_biset)

    p = sub.add_parser("height", parents=[common], help="height profiles H(g, m)")
    p.add_argument("--group", required=True)
    p.add_argument("--element", help="cycle notation or #index; all elements if omitted")
    p.set_defaults(run=cmd_height)

    p = sub.add_parser("kummer-check", parents=[common], help="Kummer verdict for a union of classes")
    p.add_argument("--group", required=True)
    p.add_argument("--class", dest="classes", required=True, help="class index or comma list, e.g. 1,3")
    p.add_argument("--r", type=int, help="defaults to [G:H] - 1")
    p.set_defaults(run=cmd_kummer_check)

    p = sub.add_parser("prime-classify", parents=[common], help="prime-degree case analysis")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--t", type=int, help="multiplier; the symmetric group S_p if omitted")
    p.set_defaults(run=cmd_prime_classify)

    p = sub.add_parser("newton-verify", parents=[common], help="partition identity on random tuples")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--ring", default="int", help="int or gf:q")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(run=cmd_newton_verify)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", choices=sorted(_SUITES), required=True)
    p.add_argument("--group", help="restrict main/kummer-sweep to one group")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--ring", default="int")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(run=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report, status = args.run(args)
    except CounterexampleError as exc:
        report = {"command": args.command, "counterexample": str(exc), "record": _jsonable(exc.record)}
        sys.stdout.write(render(report, args.format))
        return EXIT_COUNTEREXAMPLE
    except (UsageError, SpecError, GroupError, BisetError, ValueError, OSError) as exc:
        print(f"bisetalg {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(report, args.format))
    return status


def _jsonable(value):
    return json.loads(json.dumps(value, default=str))


if __name__ == "__main__":
    sys.exit(main())
