"""A library of named lambda-c terms: numeral encodings, pairing, the
fixpoint combinator, a compiler from primitive recursive definitions to
closed terms, comparison, Peano axiom terms and the minimum-principle
realizer.

Every catalog term is closed and proof-like.  Operational contracts are
stated next to each builder; the test suite checks them on the machine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import EApp, EVar, PrimRecSignature, default_signature, eval_expr, nat_of_expr
from .machine import (
    BindNumeral,
    BindTerm,
    Guard,
    InstructionRule,
    MachineConfig,
    RuleError,
    run,
)
from .syntax import App, Inst, Lam, Numeral, Process, Term, Var, stack_of


def _app(*terms: Term) -> Term:
    t = terms[0]
    for u in terms[1:]:
        t = App(t, u)
    return t


def _lam(binders: str, body: Term) -> Term:
    t = body
    for b in reversed(binders.split()):
        t = Lam(b, t)
    return t


IDENTITY = Lam("x", Var("x"))


# ---------------------------------------------------------------------------
# numerals


def church(n: int) -> Term:
    """The Church numeral \\x f. f^n x."""
    body: Term = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return _lam("x f", body)


def lazy_numeral(n: int) -> Term:
    """The lazy numeral \\x. x #n: the program-level representative of n."""
    return Lam("x", App(Var("x"), Numeral(n)))


def church_to_lazy() -> Term:
    """Sends a Church numeral to the corresponding lazy numeral."""
    return Lam("z", _app(Var("z"), lazy_numeral(0), Lam("y", App(Var("y"), Inst("s")))))


def lazy_to_church() -> Term:
    """Sends a lazy numeral to a term behaving as the Church numeral."""
    step = _lam("w n x f", App(Var("f"), _app(Var("n"), Var("x"), Var("f"))))
    return Lam("z", App(Var("z"), _app(Inst("rec"), _lam("x f", Var("x")), step)))


# ---------------------------------------------------------------------------
# pairing and fixpoint


PAIR = _lam("x y z", _app(Var("z"), Var("x"), Var("y")))


def make_pair(a: Term, b: Term) -> Term:
    """The ordered pair <a; b> = \\z. z a b."""
    return Lam("z", _app(Var("z"), a, b))


def pair_encoding() -> dict:
    """The pairing combinator with its destructor conventions."""
    return {
        "pair": PAIR,
        "usage": {
            "fst": _lam("x y", Var("x")),
            "snd": _lam("x y", Var("y")),
            "note": "<a; b> * (\\x y. x) . pi evaluates to a * pi",
        },
    }


def turing_fixpoint() -> Term:
    """Turing's fixpoint combinator: Y * F . pi evaluates in a few steps to
    F * (Y F) . pi, which makes it fit for call-by-name recursion."""
    half = _lam("y z", App(Var("z"), _app(Var("y"), Var("y"), Var("z"))))
    return App(half, half)


# ---------------------------------------------------------------------------
# Peano axioms


def peano_axiom_terms() -> dict[str, Term]:
    """Proof terms for Peano's 3rd and 4th axioms.

    peano3 proves s(x)=s(y) => x=y through the congruence pred(s(x)) = x;
    peano4 proves not (s(x)=0): the equality sends a proof of top (here the
    arbitrary proof-term \\w.w) to a proof of bottom.
    """
    return {
        "peano3": Lam("z", Var("z")),
        "peano4": Lam("z", App(Var("z"), Lam("w", Var("w")))),
    }


# ---------------------------------------------------------------------------
# the primitive recursive compiler


def compile_primrec(
    name: str, sig: PrimRecSignature, cache: dict[str, Term] | None = None
) -> Term:
    """A closed term computing the signature symbol: the compiled term
    satisfies  f * n1 . ... . nk . u . pi  >*  u * m . pi  with m the value.

    Case analysis on constructor patterns is performed with rec; recursion
    is tied with Turing's fixpoint; previously compiled symbols are inlined.
    """
    if cache is None:
        cache = {}
    if name in cache:
        return cache[name]
    if name not in sig:
        raise RuleError(f"unknown function symbol {name!r}")
    sym = sig.symbols[name]
    if name == "0":
        term = Lam("u", App(Var("u"), Numeral(0)))
        cache[name] = term
        return term
    if name == "s":
        cache[name] = Inst("s")
        return Inst("s")

    arg_names = [f"x{i + 1}" for i in range(sym.arity)]
    counter = [0]

    def fresh(prefix: str) -> str:
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    recursive = any(True for eq in sym.equations for _ in _self_calls(eq.rhs, name))

    def compile_rhs(e, env: dict[str, Term], k: Term) -> Term:
        lit = nat_of_expr(e)
        if lit is not None:
            return App(k, Numeral(lit))
        if isinstance(e, EVar):
            return App(k, env[e.name])
        if e.symbol == "s":
            v = fresh("v")
            return compile_rhs(e.args[0], env, Lam(v, _app(Inst("s"), Var(v), k)))
        fn = Var("self") if e.symbol == name else compile_primrec(e.symbol, sig, cache)

        def seq(args, values):
            if not args:
                return App(_app(fn, *values), k)
            head, *rest = args
            if isinstance(head, EVar):
                return seq(rest, values + [env[head.name]])
            lit = nat_of_expr(head)
            if lit is not None:
                return seq(rest, values + [Numeral(lit)])
            v = fresh("v")
            return compile_rhs(head, env, Lam(v, seq(rest, values + [Var(v)])))

        return seq(list(e.args), [])

    def build(knowledge: list) -> Term:
        cands = [
            eq
            for eq in sym.equations
            if all(_pat_consistent(p, know) for p, know in zip(eq.patterns, knowledge))
        ]
        if not cands:  # unreachable: equations are exhaustive
            raise RuleError(f"{name}: no equation matches")
        split = None
        for i, know in enumerate(knowledge):
            if know is None and any(eq.patterns[i].kind != "var" for eq in cands):
                split = i
                break
        if split is None:
            eq = cands[0]
            env: dict[str, Term] = {}
            for i, p in enumerate(eq.patterns):
                if p.kind == "var":
                    env[p.var] = Var(arg_names[i])
                elif p.kind == "succ":
                    env[p.var] = Var(knowledge[i][1])
            return compile_rhs(eq.rhs, env, Var("u"))
        zero_branch = build(knowledge[:split] + ["zero"] + knowledge[split + 1 :])
        pv = f"p{split}"
        succ_branch = build(knowledge[:split] + [("succ", pv)] + knowledge[split + 1 :])
        dump = fresh("w")
        return _app(
            Inst("rec"), zero_branch, _lam(f"{pv} {dump}", succ_branch), Var(arg_names[split])
        )

    tree = build([None] * sym.arity)
    body = _lam(" ".join(arg_names + ["u"]), tree)
    term = App(turing_fixpoint(), Lam("self", body)) if recursive else body
    cache[name] = term
    return term


def _pat_consistent(pat, know) -> bool:
    if know is None or pat.kind == "var":
        return True
    if know == "zero":
        return pat.kind == "zero"
    return pat.kind == "succ"


def _self_calls(e, name):
    todo = [e]
    while todo:
        cur = todo.pop()
        if isinstance(cur, EApp):
            if cur.symbol == name:
                yield cur
            todo.extend(cur.args)


# ---------------------------------------------------------------------------
# comparison


def test_le_term(sig: PrimRecSignature | None = None) -> Term:
    """A closed term deciding n <= m:
    test_le * n . m . u . v . pi  >*  u * pi  if n <= m, else  v * pi."""
    sig = sig or default_signature()
    cache: dict[str, Term] = {}
    minus = compile_primrec("minus", sig, cache)
    neg = compile_primrec("neg", sig, cache)
    # neg(minus(n, m)) is 1 iff n <= m; branch on that bit with rec
    dispatch = _app(Inst("rec"), Var("v"), _lam("p w", Var("u")), Var("b"))
    body = _app(
        minus,
        Var("n"),
        Var("m"),
        Lam("d", _app(neg, Var("d"), Lam("b", dispatch))),
    )
    return _lam("n m u v", body)


def test_le_rules() -> list[InstructionRule]:
    """The builtin-instruction build of the comparison (guarded rules)."""
    pats = (BindNumeral("n"), BindNumeral("m"), BindTerm("u"), BindTerm("v"))
    return [
        InstructionRule("test_le", pats, Var("u"), (), Guard("<=", EVar("n"), EVar("m"))),
        InstructionRule("test_le", pats, Var("v"), ()),
    ]


# ---------------------------------------------------------------------------
# the minimum principle


def min_principle_realizers(test_le: Term | None = None) -> dict[str, Term]:
    """Hand-built universal realizers for the functional minimum principle.

    min_aux takes an implementation of f, a continuation for backtracking,
    the current witness proposal n and its image m = f(n); it returns the
    pair <n; h> whose second component h compares m with the image of any
    challenger and backtracks through the continuation when the challenger
    does better.  min_princ computes f(0), saves the continuation with one
    call/cc and starts min_aux at 0.
    """
    test_le = test_le if test_le is not None else Inst("test_le")
    challenger = Lam(
        "m2",
        _app(
            test_le,
            Var("m"),
            Var("m2"),
            IDENTITY,
            App(Var("k"), _app(Var("r"), Var("f"), Var("k"), Var("n2"), Var("m2"))),
        ),
    )
    second = Lam("n2", _app(Var("f"), Var("n2"), challenger))
    min_aux = App(
        turing_fixpoint(),
        _lam("r f k n m", make_pair(Var("n"), second)),
    )
    min_princ = Lam(
        "f",
        _app(
            Var("f"),
            Numeral(0),
            Lam("m", App(Inst("cc"), Lam("k", _app(min_aux, Var("f"), Var("k"), Numeral(0), Var("m"))))),
        ),
    )
    return {"min_aux": min_aux, "min_princ": min_princ}


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class NamedTerm:
    name: str
    term: Term
    contract: str


def catalog() -> dict[str, NamedTerm]:
    """Named closed proof-like terms addressable from scripts (`use name;`)."""

    def entry(name: str, term: Term, contract: str) -> tuple[str, NamedTerm]:
        return name, NamedTerm(name, term, contract)

    minp = min_principle_realizers(test_le_term())
    return dict(
        [
            entry("I", IDENTITY, "I * t . pi  >  t * pi"),
            entry("pair", PAIR, "pair * x . y . z . pi  >*  z * x . y . pi"),
            entry("Y", turing_fixpoint(), "Y * F . pi  >*  F * (Y F) . pi"),
            entry("peano3", peano_axiom_terms()["peano3"], "proof term for s(x)=s(y) => x=y"),
            entry("peano4", peano_axiom_terms()["peano4"], "proof term for not (s(x)=0)"),
            entry(
                "church_to_lazy",
                church_to_lazy(),
                "applied to a Church numeral, behaves as the lazy numeral",
            ),
            entry(
                "lazy_to_church",
                lazy_to_church(),
                "applied to a lazy numeral, behaves as the Church numeral",
            ),
            entry("test_le", test_le_term(), "test_le * n . m . u . v . pi  >*  u|v * pi"),
            entry("min_aux", minp["min_aux"], "see min_principle_realizers"),
            entry("min_princ", minp["min_princ"], "universal realizer of the minimum principle"),
        ]
    )


# ---------------------------------------------------------------------------
# operational contract checks


def computes_value(
    t: Term, args: tuple[int, ...], cfg: MachineConfig | None = None, fuel: int = 200_000
) -> int | None:
    """Run t * args... . stop . bottom; the computed value, or None."""
    cfg = cfg if cfg is not None else MachineConfig(fuel=fuel)
    stack = stack_of(*[Numeral(n) for n in args], Inst("stop"))
    out = run(Process(t, stack), cfg)
    if out.halt.kind == "final-stop":
        return out.halt.value
    return None


def check_computes(
    t: Term,
    symbol: str,
    sig: PrimRecSignature,
    samples: list[tuple[int, ...]],
    cfg: MachineConfig | None = None,
) -> bool:
    """Spot-check the operational function contract: t computes the symbol
    when t * args . u . pi always reaches u * value . pi."""
    from .arith import expr_of_nat

    for args in samples:
        expected = eval_expr(EApp(symbol, tuple(expr_of_nat(n) for n in args)), {}, sig)
        if computes_value(t, args, cfg) != expected:
            return False
    return True
