"""Arithmetic expressions over a signature of primitive recursive symbols.

Each symbol comes with oriented defining equations over the constructor
patterns 0 and s(x).  Equation sets must be exhaustive, non-overlapping and
structurally decreasing (lexicographically), which makes both evaluation and
normalization total.  Numerals are arbitrary-precision naturals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .syntax import LamcError, ParseError, _TokenStream, _lex


class SignatureError(LamcError):
    pass


class EvalError(LamcError):
    pass


# ---------------------------------------------------------------------------
# expressions


class ArithExpr:
    __slots__ = ()

    def __str__(self) -> str:
        return print_expr(self)


@dataclass(frozen=True)
class EVar(ArithExpr):
    name: str


@dataclass(frozen=True)
class EApp(ArithExpr):
    symbol: str
    args: tuple[ArithExpr, ...] = ()


ZERO = EApp("0")

Valuation = Mapping[str, int]


def expr_of_nat(n: int) -> ArithExpr:
    """The constructor numeral s(s(...(0))) for n."""
    if n < 0:
        raise ValueError("naturals only")
    e = ZERO
    for _ in range(n):
        e = EApp("s", (e,))
    return e


def nat_of_expr(e: ArithExpr) -> int | None:
    """Inverse of expr_of_nat; None when e is not a constructor numeral."""
    n = 0
    while True:
        match e:
            case EApp("s", (inner,)):
                n += 1
                e = inner
            case EApp("0", ()):
                return n
            case _:
                return None


def expr_free_vars(e: ArithExpr) -> frozenset[str]:
    acc: set[str] = set()
    todo = [e]
    while todo:
        cur = todo.pop()
        if isinstance(cur, EVar):
            acc.add(cur.name)
        else:
            todo.extend(cur.args)
    return frozenset(acc)


def expr_is_ground(e: ArithExpr) -> bool:
    todo = [e]
    while todo:
        cur = todo.pop()
        if isinstance(cur, EVar):
            return False
        todo.extend(cur.args)
    return True


def expr_subst(e: ArithExpr, env: Mapping[str, ArithExpr]) -> ArithExpr:
    if not env or expr_is_ground(e):
        return e
    match e:
        case EVar(name):
            return env.get(name, e)
        case EApp(symbol, args):
            return EApp(symbol, tuple(expr_subst(a, env) for a in args))
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class Pattern:
    """An argument pattern: a variable, the constant 0, or s(variable)."""

    kind: str  # "var" | "zero" | "succ"
    var: str | None = None

    def as_expr(self) -> ArithExpr:
        if self.kind == "var":
            return EVar(self.var)
        if self.kind == "zero":
            return ZERO
        return EApp("s", (EVar(self.var),))


@dataclass(frozen=True)
class Equation:
    patterns: tuple[Pattern, ...]
    rhs: ArithExpr


@dataclass(frozen=True)
class SymbolDef:
    name: str
    arity: int
    equations: tuple[Equation, ...]  # empty for the constructors 0 and s


class PrimRecSignature:
    """Immutable symbol table.  ``define`` returns an extended signature."""

    def __init__(self, symbols: dict[str, SymbolDef] | None = None):
        if symbols is None:
            symbols = {}
            for name, arity in (("0", 0), ("s", 1)):
                symbols[name] = SymbolDef(name, arity, ())
        self.symbols = symbols

    def __contains__(self, name: str) -> bool:
        return name in self.symbols

    def arity(self, name: str) -> int:
        try:
            return self.symbols[name].arity
        except KeyError:
            raise SignatureError(f"unknown function symbol {name!r}") from None

    def define(self, name: str, arity: int, equations: list[Equation]) -> "PrimRecSignature":
        if name in self.symbols:
            raise SignatureError(f"symbol {name!r} is already defined")
        sym = SymbolDef(name, arity, tuple(equations))
        _validate_symbol(sym, self)
        table = dict(self.symbols)
        table[name] = sym
        return PrimRecSignature(table)


def _validate_symbol(sym: SymbolDef, sig: PrimRecSignature) -> None:
    if not sym.equations:
        raise SignatureError(f"{sym.name}: at least one defining equation required")
    for eq in sym.equations:
        if len(eq.patterns) != sym.arity:
            raise SignatureError(f"{sym.name}: pattern arity mismatch")
        seen: set[str] = set()
        for p in eq.patterns:
            if p.kind in ("var", "succ"):
                if p.var in seen:
                    raise SignatureError(f"{sym.name}: non-linear pattern variable {p.var!r}")
                seen.add(p.var)
        _validate_rhs(sym, eq, seen, sig)
    _check_cases(sym)
    _check_decrease(sym)


def _validate_rhs(sym: SymbolDef, eq: Equation, bound: set[str], sig: PrimRecSignature) -> None:
    todo = [eq.rhs]
    while todo:
        e = todo.pop()
        if isinstance(e, EVar):
            if e.name not in bound:
                raise SignatureError(f"{sym.name}: unbound variable {e.name!r} in equation")
            continue
        if e.symbol != sym.name and e.symbol not in sig:
            raise SignatureError(f"{sym.name}: unknown symbol {e.symbol!r} in equation")
        arity = sym.arity if e.symbol == sym.name else sig.arity(e.symbol)
        if len(e.args) != arity:
            raise SignatureError(f"{sym.name}: {e.symbol!r} applied to {len(e.args)} arguments")
        todo.extend(e.args)


def _check_cases(sym: SymbolDef) -> None:
    """Equations must be exhaustive and non-overlapping on constructor cases."""
    constrained = [
        i
        for i in range(sym.arity)
        if any(eq.patterns[i].kind != "var" for eq in sym.equations)
    ]
    for mask in range(1 << len(constrained)):
        values = [0] * sym.arity
        for bit, pos in enumerate(constrained):
            values[pos] = 1 if mask >> bit & 1 else 0
        matching = [eq for eq in sym.equations if _eq_matches(eq, values)]
        if len(matching) != 1:
            shape = ", ".join(
                ("s _" if values[i] else "0") if i in constrained else "_"
                for i in range(sym.arity)
            )
            what = "overlapping" if len(matching) > 1 else "missing"
            raise SignatureError(f"{sym.name}: {what} case ({shape})")


def _eq_matches(eq: Equation, values: list[int]) -> bool:
    for p, v in zip(eq.patterns, values):
        if p.kind == "zero" and v != 0:
            return False
        if p.kind == "succ" and v == 0:
            return False
    return True


def _check_decrease(sym: SymbolDef) -> None:
    """Every self-call must decrease lexicographically under the patterns."""
    for eq in sym.equations:
        for call in _self_calls(eq.rhs, sym.name):
            if not _lex_smaller(call, eq.patterns):
                raise SignatureError(
                    f"{sym.name}: recursive call {print_expr(EApp(sym.name, call))} "
                    f"does not structurally decrease"
                )


def _self_calls(e: ArithExpr, name: str):
    todo = [e]
    while todo:
        cur = todo.pop()
        if isinstance(cur, EApp):
            if cur.symbol == name:
                yield cur.args
            todo.extend(cur.args)


def _lex_smaller(args: tuple[ArithExpr, ...], patterns: tuple[Pattern, ...]) -> bool:
    for arg, pat in zip(args, patterns):
        cmp = _compare(arg, pat)
        if cmp == "less":
            return True
        if cmp != "equal":
            return False
    return False


def _compare(arg: ArithExpr, pat: Pattern) -> str:
    if arg == pat.as_expr():
        return "equal"
    if pat.kind == "succ" and arg in (EVar(pat.var), ZERO):
        return "less"
    return "unknown"


def default_signature() -> PrimRecSignature:
    """Constructors plus the standard symbols +, *, pred, neg, minus."""
    v = lambda n: Pattern("var", n)
    z = Pattern("zero")
    sc = lambda n: Pattern("succ", n)
    x, y = EVar("x"), EVar("y")
    plus = lambda a, b: EApp("+", (a, b))
    times = lambda a, b: EApp("*", (a, b))
    succ = lambda a: EApp("s", (a,))

    sig = PrimRecSignature()
    sig = sig.define("+", 2, [
        Equation((z, v("y")), y),
        Equation((sc("x"), v("y")), succ(plus(x, y))),
    ])
    sig = sig.define("*", 2, [
        Equation((z, v("y")), ZERO),
        Equation((sc("x"), v("y")), plus(times(x, y), y)),
    ])
    sig = sig.define("pred", 1, [
        Equation((z,), ZERO),
        Equation((sc("x"),), x),
    ])
    sig = sig.define("neg", 1, [
        Equation((z,), succ(ZERO)),
        Equation((sc("x"),), ZERO),
    ])
    sig = sig.define("minus", 2, [
        Equation((v("x"), z), x),
        Equation((z, sc("y")), ZERO),
        Equation((sc("x"), sc("y")), EApp("minus", (x, y))),
    ])
    return sig


# ---------------------------------------------------------------------------
# evaluation (explicit stack: numerals can be large)


def eval_expr(e: ArithExpr, rho: Valuation, sig: PrimRecSignature) -> int:
    """The standard value of e under rho, computed through the equations."""
    values: list[int] = []
    # tasks: ("eval", expr, env) or ("apply", symbol name, env-for-error)
    tasks: list[tuple] = [("eval", e, rho)]
    while tasks:
        task = tasks.pop()
        if task[0] == "eval":
            _, cur, env = task
            if isinstance(cur, EVar):
                try:
                    values.append(env[cur.name])
                except KeyError:
                    raise EvalError(f"unbound variable {cur.name!r}") from None
                continue
            if cur.symbol not in sig:
                raise EvalError(f"unknown function symbol {cur.symbol!r}")
            tasks.append(("apply", cur))
            for a in cur.args:
                tasks.append(("eval", a, env))
        else:
            _, cur = task
            argc = len(cur.args)
            args = values[len(values) - argc :] if argc else []
            del values[len(values) - argc :]
            args.reverse()
            sym = sig.symbols[cur.symbol]
            if sym.name == "0":
                values.append(0)
            elif sym.name == "s":
                values.append(args[0] + 1)
            else:
                eq, env = _match_values(sym, args)
                tasks.append(("eval", eq.rhs, env))
    assert len(values) == 1
    return values.pop()


def _match_values(sym: SymbolDef, args: list[int]) -> tuple[Equation, dict[str, int]]:
    for eq in sym.equations:
        env: dict[str, int] = {}
        for p, v in zip(eq.patterns, args):
            if p.kind == "var":
                env[p.var] = v
            elif p.kind == "zero":
                if v != 0:
                    break
            else:
                if v == 0:
                    break
                env[p.var] = v - 1
        else:
            return eq, env
    raise EvalError(f"{sym.name}: no equation matches {args}")  # unreachable


# ---------------------------------------------------------------------------
# normalization and congruence


def normalize_expr(e: ArithExpr, sig: PrimRecSignature) -> ArithExpr:
    """The unique normal form of e under the oriented defining equations.

    Ground expressions normalize to constructor numerals, so they are
    evaluated directly; open expressions rewrite until a variable blocks.
    """
    if expr_is_ground(e):
        return expr_of_nat(eval_expr(e, {}, sig))
    match e:
        case EVar(_):
            return e
        case EApp(symbol, args):
            nargs = tuple(normalize_expr(a, sig) for a in args)
            if symbol not in sig:
                raise EvalError(f"unknown function symbol {symbol!r}")
            sym = sig.symbols[symbol]
            if not sym.equations:  # constructor
                return EApp(symbol, nargs)
            m = _match_structural(sym, nargs)
            if m is None:
                return EApp(symbol, nargs)
            eq, env = m
            return normalize_expr(expr_subst(eq.rhs, env), sig)
    raise TypeError(f"not an expression: {e!r}")


def _match_structural(
    sym: SymbolDef, args: tuple[ArithExpr, ...]
) -> tuple[Equation, dict[str, ArithExpr]] | None:
    for eq in sym.equations:
        env: dict[str, ArithExpr] = {}
        for p, a in zip(eq.patterns, args):
            if p.kind == "var":
                env[p.var] = a
            elif p.kind == "zero":
                if a != ZERO:
                    break
            else:
                if not (isinstance(a, EApp) and a.symbol == "s"):
                    break
                env[p.var] = a.args[0]
        else:
            return eq, env
    return None


def expr_congruent(e1: ArithExpr, e2: ArithExpr, sig: PrimRecSignature) -> bool:
    return normalize_expr(e1, sig) == normalize_expr(e2, sig)


# ---------------------------------------------------------------------------
# surface syntax: infix + and *, call syntax f(e1,...,ek), decimal literals


def parse_expr(text: str, sig: PrimRecSignature) -> ArithExpr:
    ts = _TokenStream(_lex(text))
    e = _parse_expr(ts, sig)
    tok = ts.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)
    return e


def _parse_expr(ts: _TokenStream, sig: PrimRecSignature) -> ArithExpr:
    e = _parse_addend(ts, sig)
    while ts.peek().text == "+":
        ts.next()
        e = EApp("+", (e, _parse_addend(ts, sig)))
    return e


def _parse_addend(ts: _TokenStream, sig: PrimRecSignature) -> ArithExpr:
    e = _parse_factor(ts, sig)
    while ts.peek().text == "*" and ts.peek().kind == "punct":
        ts.next()
        e = EApp("*", (e, _parse_factor(ts, sig)))
    return e


def _parse_factor(ts: _TokenStream, sig: PrimRecSignature) -> ArithExpr:
    tok = ts.peek()
    if tok.kind == "nat":
        ts.next()
        return expr_of_nat(int(tok.text))
    if tok.kind == "ident":
        ts.next()
        if ts.peek().text == "(":
            ts.next()
            args = []
            if ts.peek().text != ")":
                args.append(_parse_expr(ts, sig))
                while ts.peek().text == ",":
                    ts.next()
                    args.append(_parse_expr(ts, sig))
            ts.expect(")")
            if tok.text not in sig:
                raise ParseError(f"unknown function symbol {tok.text!r}", tok.line, tok.col)
            if sig.arity(tok.text) != len(args):
                raise ParseError(
                    f"{tok.text!r} expects {sig.arity(tok.text)} arguments", tok.line, tok.col
                )
            return EApp(tok.text, tuple(args))
        if tok.text in sig and sig.arity(tok.text) == 0:
            return EApp(tok.text)
        return EVar(tok.text)
    if tok.text == "(":
        ts.next()
        e = _parse_expr(ts, sig)
        ts.expect(")")
        return e
    raise ParseError(f"expected an arithmetic expression, found {tok.text!r}", tok.line, tok.col)


def print_expr(e: ArithExpr) -> str:
    n = nat_of_expr(e)
    if n is not None:
        return str(n)
    match e:
        case EVar(name):
            return name
        case EApp("+", (a, b)):
            return f"{print_expr(a)} + {_print_tight(b)}"
        case EApp("*", (a, b)):
            return f"{_print_atom_expr(a)} * {_print_atom_expr(b)}"
        case EApp(symbol, ()):
            return symbol
        case EApp(symbol, args):
            return symbol + "(" + ", ".join(print_expr(a) for a in args) + ")"
    raise TypeError(f"not an expression: {e!r}")


def _print_tight(e: ArithExpr) -> str:
    if isinstance(e, EApp) and e.symbol == "+" and nat_of_expr(e) is None:
        return "(" + print_expr(e) + ")"
    return print_expr(e)


def _print_atom_expr(e: ArithExpr) -> str:
    if isinstance(e, EApp) and e.symbol in ("+", "*") and nat_of_expr(e) is None:
        return "(" + print_expr(e) + ")"
    return print_expr(e)
