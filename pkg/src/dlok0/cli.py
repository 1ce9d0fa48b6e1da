"""Command-line interface.

Exit codes: 0 success (or the checked identity holds), 1 the checked
property is false, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from fractions import Fraction
from math import factorial

from . import genring
from .atoms import chain_atom, sort_params, split
from .characteristic import Characteristic, chi, equivalent
from .formula import (
    ParseError,
    format_formula,
    format_rational,
    free_variables,
    parameters,
    parse_formula,
    parse_rational,
)
from .genring import format_genpoly, genpoly_to_json, parse_genpoly, zeta, zeta_inv
from .grothendieck import is_effective, merge_counts, mul, no_injection_certificate, php_check
from .oracle import atom_product_split, delannoy, random_definable_set, random_element
from .qe import eliminate_quantifiers


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers

def _rational(text):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _param_list(text):
    if not text.strip():
        return ()
    try:
        return tuple(parse_rational(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _var_list(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _definable(text, variables=None, params=()):
    """Formula text -> quantifier-free positive DNF."""
    f = parse_formula(text, variables)
    return eliminate_quantifiers(f, variables or free_variables(f), params)


def _char_text(c: Characteristic) -> str:
    lines = ["params: [" + ", ".join(format_rational(p) for p in c.params) + "]"]
    if not c.coeffs:
        lines.append("  0")
    for gaps, coeff in c:
        lines.append(f"  {list(gaps)}: {coeff}")
    return "\n".join(lines)


def _params_text(params):
    return "[" + ", ".join(format_rational(p) for p in params) + "]"


# ---------------------------------------------------------------------------
# k0 expressions: chi(<formula>), X(a;n), integers, + - * and parentheses

_K0_TOKEN = re.compile(r"\s*(?:(?P<gen>X\(\s*(?:-inf|-?\d+(?:/\d+)?)\s*;\s*\d+\s*\))"
                       r"|(?P<chi>chi\()|(?P<int>\d+)|(?P<op>[-+*()]))")


def _tokenize_k0(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _K0_TOKEN.match(text, pos)
        if not m:
            raise ParseError("unknown token in k0 expression", pos)
        if m.group("chi"):
            depth = 1
            j = m.end()
            while j < len(text) and depth:
                depth += {"(": 1, ")": -1}.get(text[j], 0)
                j += 1
            if depth:
                raise ParseError("unbalanced chi(", m.start("chi"))
            tokens.append(("chi", text[m.end():j - 1], m.start("chi")))
            pos = j
            continue
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", None, len(text)))
    return tokens


def _parse_k0(text):
    """Parse to a small tree of tuples."""
    tokens = _tokenize_k0(text)
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def expr():
        node = None
        if peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            node = ("neg", term()) if op == "-" else term()
        else:
            node = term()
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            node = ("add" if op == "+" else "sub", node, term())
        return node

    def term():
        node = factor()
        while peek()[0] == "op" and peek()[1] == "*":
            take()
            node = ("mul", node, factor())
        return node

    def factor():
        kind, val, pos = take()
        if kind == "int":
            return ("int", int(val))
        if kind == "gen":
            return ("poly", parse_genpoly(val))
        if kind == "chi":
            f = parse_formula(val)
            return ("chi", eliminate_quantifiers(f))
        if kind == "op" and val == "(":
            node = expr()
            if take()[1] != ")":
                raise ParseError("expected ')'", pos)
            return node
        if kind == "op" and val == "-":
            return ("neg", factor())
        raise ParseError(f"unexpected {val if val is not None else 'end of input'!r}", pos)

    node = expr()
    if peek()[0] != "eof":
        raise ParseError(f"unexpected {peek()[1]!r}", peek()[2])
    return node


def _k0_params(node, acc):
    tag = node[0]
    if tag == "poly":
        acc.update(node[1].params())
    elif tag == "chi":
        acc.update(node[1].params)
    elif tag in ("add", "sub", "mul"):
        _k0_params(node[1], acc)
        _k0_params(node[2], acc)
    elif tag == "neg":
        _k0_params(node[1], acc)
    return acc


def _k0_eval(node, params):
    tag = node[0]
    if tag == "int":
        return Characteristic.constant(node[1], params)
    if tag == "poly":
        return zeta(node[1], params)
    if tag == "chi":
        return chi(node[1], params)
    if tag == "neg":
        return -_k0_eval(node[1], params)
    a, b = _k0_eval(node[1], params), _k0_eval(node[2], params)
    if tag == "add":
        return a + b
    if tag == "sub":
        return a - b
    return mul(a, b)


def eval_k0(text: str, params=()) -> Characteristic:
    node = _parse_k0(text)
    ps = sort_params(_k0_params(node, set(params)))
    return _k0_eval(node, ps)


# ---------------------------------------------------------------------------
# commands; each returns (exit code, json payload, text)

def cmd_parse(args):
    f = parse_formula(args.formula, args.vars)
    payload = {
        "formula": format_formula(f),
        "free_vars": list(args.vars or free_variables(f)),
        "params": [format_rational(p) for p in sort_params(parameters(f))],
    }
    return 0, payload, payload["formula"]


def cmd_qe(args):
    d = _definable(args.formula, args.vars)
    payload = {
        "dnf": str(d),
        "vars": list(d.variables),
        "clauses": [[str(c) for c in cl] for cl in d.sorted_clauses()],
    }
    return 0, payload, str(d)


def _set_params(d, extra):
    return sort_params(set(d.params) | set(extra or ()))


def cmd_split(args):
    d = _definable(args.formula, args.vars, args.params or ())
    params = _set_params(d, args.params)
    atoms = split(d, params)
    texts = [a.format(d.variables) for a in atoms]
    payload = {"params": [format_rational(p) for p in params], "vars": list(d.variables),
               "atoms": texts}
    return 0, payload, "\n".join(texts) if texts else "(empty)"


def cmd_chi(args):
    d = _definable(args.formula, args.vars, args.params or ())
    c = chi(d, _set_params(d, args.params))
    return 0, c.to_json(), _char_text(c)


def cmd_equiv(args):
    d1 = _definable(args.f1, args.vars1)
    d2 = _definable(args.f2, args.vars2)
    same, params = equivalent(d1, d2)
    c1, c2 = chi(d1, params), chi(d2, params)
    payload = {"equivalent": same, "witness_params": [format_rational(p) for p in params],
               "chi1": c1.to_json(), "chi2": c2.to_json()}
    text = ("equivalent" if same else "not equivalent") + f"; witness params {_params_text(params)}"
    return (0 if same else 1), payload, text


def _k0_output(c):
    p = zeta_inv(c)
    return {"chi": c.to_json(), "normal_form": format_genpoly(p)}, \
        _char_text(c) + "\nnormal form: " + format_genpoly(p)


def cmd_k0(args):
    exprs = args.expr
    need = {"add": 2, "mul": 2, "neg": 1, "normalform": 1}[args.op]
    if len(exprs) != need:
        raise UsageError(f"k0 {args.op} takes {need} --expr argument(s)")
    node_params = set()
    nodes = [_parse_k0(e) for e in exprs]
    for n in nodes:
        _k0_params(n, node_params)
    params = sort_params(node_params)
    vals = [_k0_eval(n, params) for n in nodes]
    if args.op == "add":
        c = vals[0] + vals[1]
    elif args.op == "mul":
        c = mul(vals[0], vals[1])
    elif args.op == "neg":
        c = -vals[0]
    else:
        c = vals[0]
    if args.op == "normalform":
        p = zeta_inv(c)
        payload, text = {"normal_form": format_genpoly(p), **genpoly_to_json(p)}, format_genpoly(p)
    else:
        payload, text = _k0_output(c)
    if args.budget is not None:
        witness = is_effective(c, args.budget)
        payload["effective_witness"] = None if witness is None else [format_rational(q) for q in witness]
        text += "\neffective: " + ("not found within budget" if witness is None
                                   else "yes, over " + _params_text(witness))
    return 0, payload, text


def cmd_zeta(args):
    p = parse_genpoly(args.poly)
    params = sort_params(p.params() | set(args.params or ()))
    c = zeta(p, params)
    return 0, c.to_json(), _char_text(c)


def cmd_zeta_inv(args):
    if (args.char is None) == (args.expr is None):
        raise UsageError("zeta-inv needs exactly one of --char or --expr")
    if args.char is not None:
        try:
            c = Characteristic.from_json(args.char)
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"bad characteristic JSON: {exc}") from None
    else:
        c = eval_k0(args.expr)
    p = zeta_inv(c)
    return 0, genpoly_to_json(p), format_genpoly(p)


def cmd_random_set(args):
    names = args.vars or tuple(f"x{i + 1}" for i in range(args.n))
    if len(names) != args.n:
        raise UsageError("--vars must list exactly n names")
    d = random_definable_set(args.seed, args.n, args.params or (), args.density, names)
    c = chi(d, sort_params(d.params))
    payload = {"dnf": str(d), "vars": list(names), "chi": c.to_json()}
    return 0, payload, str(d)


# verify subcommands

def verify_convolution_cmd(args):
    lhs, rhs = genring.convolution_sides(args.n, args.a, args.c, args.b)
    ok = genring.verify_convolution(args.n, args.a, args.c, args.b)
    a, c, b = (format_rational(x) for x in (args.a, args.c, args.b))
    identity = (f"f_{args.n}({b},{a}) = sum_i f_i({b},{c}) f_{{{args.n}-i}}({c},{a})"
                f" + sum_i f_i({b},{c}) f_{{{args.n}-1-i}}({c},{a})")
    return ok, identity, {"lhs": format_genpoly(lhs), "rhs": format_genpoly(genring.reduce_mod_I(rhs))}


def verify_factorial_cmd(args):
    lhs, rhs = genring.factorial_sides(args.n, args.a, args.b)
    ok = genring.verify_factorial(args.n, args.a, args.b)
    a, b = format_rational(args.a), format_rational(args.b)
    identity = f"{factorial(args.n)} * f_{args.n}({b},{a}) = prod_{{i<{args.n}}} (f_1({b},{a}) - i)"
    return ok, identity, {"lhs": format_genpoly(lhs), "rhs": format_genpoly(genring.reduce_mod_I(rhs))}


def verify_iprime_cmd(args):
    if not 1 <= args.l <= args.k:
        raise UsageError("need 1 <= l <= k")
    cong = genring.iprime_congruence(args.k, args.l, args.a)
    ok = genring.verify_Iprime_congruence(args.k, args.l, args.a)
    extra = {"congruence": format_genpoly(cong)}
    try:
        extra["multiplier"] = genring.iprime_multiplier(args.k, args.l, args.a)
    except RuntimeError as exc:
        ok = False
        extra["error"] = str(exc)
    identity = f"{format_genpoly(cong)} == 0 (mod I')"
    return ok, identity, extra


def verify_php_cmd(args):
    d1 = _definable(args.f1, args.vars)
    d2 = _definable(args.f2, args.vars or d1.variables)
    if d1.variables != d2.variables:
        names = tuple(dict.fromkeys(d1.variables + d2.variables))
        d1, d2 = d1.with_variables(names), d2.with_variables(names)
    try:
        ok = php_check(d1, d2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return ok, "[D1] != [D2] for D1 a proper subset of D2", {}


def _cert_json(cert):
    if cert is None:
        return None
    lo, hi = cert.interval
    return {"params": [format_rational(p) for p in cert.params], "gap": cert.gap,
            "interval": ["-inf" if lo is None else format_rational(lo),
                         "inf" if hi is None else format_rational(hi)],
            "color": list(cert.color)}


def verify_cc1_cmd(args):
    d1 = _definable(args.f1, args.vars1)
    d2 = _definable(args.f2, args.vars2)
    c12 = no_injection_certificate(d1, d2)
    c21 = no_injection_certificate(d2, d1)
    ok = c12 is not None and c21 is not None
    return ok, "no definable injection D1 -> D2 and none D2 -> D1", \
        {"d1_to_d2": _cert_json(c12), "d2_to_d1": _cert_json(c21)}


def verify_cancellativity_cmd(args):
    rng = random.Random(args.seed)
    holds = 0
    premise = 0
    for _ in range(args.trials):
        params = sort_params(rng.sample(range(-4, 5), rng.randint(0, 2)))
        a = random_element(rng, params, signed=False)
        c = random_element(rng, params, signed=False)
        b = a.refine(sort_params(set(params) | {Fraction(9)})) if rng.random() < 0.5 \
            else random_element(rng, params, signed=False)
        if a + c == b + c:
            premise += 1
            holds += a == b
        else:
            holds += 1
    ok = holds == args.trials
    return ok, "a + c = b + c implies a = b", {"trials": args.trials, "premise_true": premise}


def verify_delannoy_cmd(args):
    ok = True
    for g in range(args.max + 1):
        for h in range(args.max + 1):
            total = sum(m for _, m in merge_counts(g, h))
            if total != delannoy(g, h):
                ok = False
            ea = Characteristic((0,), {(g, 0): 1})
            eb = Characteristic((0,), {(h, 0): 1})
            oracle = atom_product_split(chain_atom((0,), (g,)), chain_atom((0,), (h,)))
            if not mul(ea, eb).same_representation(oracle):
                ok = False
    return ok, f"sum_i C(h+i,i) C(h,g-i) = D(g,h) and products match interleavings, g,h <= {args.max}", {}


VERIFIERS = {
    "convolution": verify_convolution_cmd,
    "factorial": verify_factorial_cmd,
    "iprime": verify_iprime_cmd,
    "php": verify_php_cmd,
    "cc1": verify_cc1_cmd,
    "cancellativity": verify_cancellativity_cmd,
    "delannoy": verify_delannoy_cmd,
}


def cmd_verify(args):
    ok, identity, extra = VERIFIERS[args.check](args)
    payload = {"check": args.check, "holds": bool(ok), "identity": identity, **extra}
    text = f"{'holds' if ok else 'FAILS'}: {identity}"
    for k, v in extra.items():
        text += f"\n  {k}: {json.dumps(v) if not isinstance(v, str) else v}"
    return (0 if ok else 1), payload, text


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")

    parser = argparse.ArgumentParser(prog="dlok0", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and pretty-print a formula")
    p.add_argument("--formula", "-f", required=True)
    p.add_argument("--vars", type=_var_list)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("qe", parents=[common], help="eliminate quantifiers")
    p.add_argument("--formula", "-f", required=True)
    p.add_argument("--vars", type=_var_list)
    p.set_defaults(func=cmd_qe)

    for name, func, helptext in (("split", cmd_split, "list the atoms of a set"),
                                 ("chi", cmd_chi, "global characteristic of a set")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--formula", "-f", required=True)
        p.add_argument("--vars", type=_var_list)
        p.add_argument("--params", type=_param_list, help='extra parameters, e.g. "1,0"')
        p.set_defaults(func=func)

    p = sub.add_parser("equiv", parents=[common], help="decide definable bijection")
    p.add_argument("--f1", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--vars1", type=_var_list)
    p.add_argument("--vars2", type=_var_list)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("k0", parents=[common], help="arithmetic in K0")
    p.add_argument("op", choices=["add", "mul", "neg", "normalform"])
    p.add_argument("--expr", action="append", required=True)
    p.add_argument("--budget", type=int, help="also search for an effective refinement with up to N new parameters")
    p.set_defaults(func=cmd_k0)

    p = sub.add_parser("zeta", parents=[common], help="evaluate a generator polynomial in K0")
    p.add_argument("--poly", required=True)
    p.add_argument("--params", type=_param_list)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("zeta-inv", parents=[common], help="normal form of a K0 element")
    p.add_argument("--char", help="characteristic JSON")
    p.add_argument("--expr", help="k0 expression")
    p.set_defaults(func=cmd_zeta_inv)

    p = sub.add_parser("random-set", parents=[common], help="seeded random definable set")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--params", type=_param_list)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--vars", type=_var_list)
    p.set_defaults(func=cmd_random_set)

    p = sub.add_parser("verify", help="check an identity of K0")
    vsub = p.add_subparsers(dest="check", required=True)
    v = vsub.add_parser("convolution", parents=[common])
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--a", type=_rational, required=True)
    v.add_argument("--c", type=_rational, required=True)
    v.add_argument("--b", type=_rational, required=True)
    v = vsub.add_parser("factorial", parents=[common])
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--a", type=_rational, required=True)
    v.add_argument("--b", type=_rational, required=True)
    v = vsub.add_parser("iprime", parents=[common])
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--l", type=int, required=True)
    v.add_argument("--a", type=_rational, default=Fraction(0))
    v = vsub.add_parser("php", parents=[common])
    v.add_argument("--f1", required=True)
    v.add_argument("--f2", required=True)
    v.add_argument("--vars", type=_var_list)
    v = vsub.add_parser("cc1", parents=[common])
    v.add_argument("--f1", required=True)
    v.add_argument("--f2", required=True)
    v.add_argument("--vars1", type=_var_list)
    v.add_argument("--vars2", type=_var_list)
    v = vsub.add_parser("cancellativity", parents=[common])
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=200)
    v = vsub.add_parser("delannoy", parents=[common])
    v.add_argument("--max", type=int, default=4)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, payload, text = args.func(args)
    except (ParseError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if getattr(args, "json", False):
        print(json.dumps(payload, sort_keys=True), file=stdout)
    else:
        print(text, file=stdout)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
