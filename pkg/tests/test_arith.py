import random

import pytest

from lamc.arith import (
    EApp,
    EVar,
    Equation,
    EvalError,
    Pattern,
    SignatureError,
    ZERO,
    default_signature,
    eval_expr,
    expr_congruent,
    expr_of_nat,
    nat_of_expr,
    normalize_expr,
    parse_expr,
    print_expr,
    _match_structural,
)


def ev(src, rho=None, sig=None):
    sig = sig or default_signature()
    return eval_expr(parse_expr(src, sig), rho or {}, sig)


def nf(src, sig=None):
    sig = sig or default_signature()
    return normalize_expr(parse_expr(src, sig), sig)


class TestEval:
    def test_pred_of_one(self, sig):
        assert ev("pred(s(0))") == 0

    def test_minus(self, sig):
        # hand-applied equations: minus(s x, s y) = minus(x, y), minus(x, 0) = x
        assert ev("minus(5, 3)") == 2
        assert ev("minus(3, 5)") == 0

    def test_plus_with_valuation(self):
        assert ev("s(x) + y", {"x": 4, "y": 2}) == 7

    def test_times(self):
        assert ev("3 * 4") == 12

    def test_neg(self):
        assert ev("neg(0)") == 1
        assert ev("neg(s(s(0)))") == 0

    def test_large_numerals(self):
        assert ev("minus(1023, 1000) + minus(1000, 1023)") == 23

    def test_unbound_variable(self, sig):
        with pytest.raises(EvalError, match="unbound"):
            eval_expr(EVar("q"), {}, sig)

    def test_unknown_symbol(self, sig):
        with pytest.raises(EvalError, match="unknown"):
            eval_expr(EApp("mystery", (ZERO,)), {}, sig)


class TestNormalize:
    def test_pred_zero(self):
        assert nf("pred(0)") == ZERO

    def test_neg_succ_open(self):
        assert nf("neg(s(x))") == ZERO

    def test_minus_two_one(self):
        assert nf("minus(s(s(0)), s(0))") == expr_of_nat(1)

    def test_open_normal_form_blocks(self):
        assert nf("minus(x, y)") == parse_expr("minus(x, y)", default_signature())

    def test_pred_succ_var(self):
        assert nf("pred(s(y))") == EVar("y")

    def test_congruence(self, sig):
        assert expr_congruent(parse_expr("0 + y", sig), EVar("y"), sig)
        assert not expr_congruent(EVar("y"), EVar("z"), sig)


class TestNumerals:
    def test_round_trip(self):
        assert nat_of_expr(expr_of_nat(137)) == 137

    def test_non_numeral(self):
        assert nat_of_expr(EVar("x")) is None

    def test_print_decimal_compression(self, sig):
        assert print_expr(expr_of_nat(1000)) == "1000"
        assert print_expr(parse_expr("minus(x, 10)", sig)) == "minus(x, 10)"

    def test_print_infix(self, sig):
        assert print_expr(parse_expr("2 * x + 1", sig)) == "2 * x + 1"


class TestSignature:
    def test_builtins_present(self, sig):
        for name in ("0", "s", "+", "*", "pred", "neg", "minus"):
            assert name in sig

    def test_redefinition_rejected(self, sig):
        with pytest.raises(SignatureError, match="already defined"):
            sig.define("pred", 1, [Equation((Pattern("var", "x"),), EVar("x"))])

    def test_missing_case(self, sig):
        with pytest.raises(SignatureError, match="missing"):
            sig.define("half", 1, [Equation((Pattern("zero"),), ZERO)])

    def test_overlapping_case(self, sig):
        with pytest.raises(SignatureError, match="overlapping"):
            sig.define(
                "both",
                1,
                [
                    Equation((Pattern("var", "x"),), EVar("x")),
                    Equation((Pattern("zero"),), ZERO),
                ],
            )

    def test_non_decreasing_recursion(self, sig):
        with pytest.raises(SignatureError, match="decrease"):
            sig.define(
                "spin",
                1,
                [
                    Equation((Pattern("zero"),), ZERO),
                    Equation(
                        (Pattern("succ", "x"),),
                        EApp("spin", (EApp("s", (EVar("x"),)),)),
                    ),
                ],
            )

    def test_unknown_symbol_in_rhs(self, sig):
        with pytest.raises(SignatureError, match="unknown symbol"):
            sig.define("f", 1, [Equation((Pattern("var", "x"),), EApp("ghost", (EVar("x"),)))])

    def test_non_linear_pattern(self, sig):
        with pytest.raises(SignatureError, match="non-linear"):
            sig.define(
                "diag",
                2,
                [Equation((Pattern("var", "x"), Pattern("var", "x")), EVar("x"))],
            )

    def test_ackermann_accepted(self, sig):
        # nested recursion with lexicographic descent is in the accepted class
        v, z, sc = (lambda n: Pattern("var", n)), Pattern("zero"), (lambda n: Pattern("succ", n))
        ack = lambda a, b: EApp("ack", (a, b))
        s = lambda a: EApp("s", (a,))
        sig2 = sig.define(
            "ack",
            2,
            [
                Equation((z, v("y")), s(EVar("y"))),
                Equation((sc("x"), z), ack(EVar("x"), s(ZERO))),
                Equation((sc("x"), sc("y")), ack(EVar("x"), ack(s(EVar("x")), EVar("y")))),
            ],
        )
        assert eval_expr(parse_expr("ack(2, 3)", sig2), {}, sig2) == 9

    def test_composition_accepted(self, sig):
        sig2 = sig.define(
            "dist", 1, [Equation((Pattern("var", "x"),), parse_expr("minus(x, 3) + minus(3, x)", sig))]
        )
        assert eval_expr(parse_expr("dist(10)", sig2), {}, sig2) == 7
        assert eval_expr(parse_expr("dist(1)", sig2), {}, sig2) == 2


# randomized properties


def random_expr(rng, sig, depth, vars=("x", "y")):
    if depth <= 0 or rng.random() < 0.3:
        choice = rng.random()
        if choice < 0.4:
            return EVar(rng.choice(vars))
        return expr_of_nat(rng.randint(0, 4))
    name = rng.choice(["+", "*", "pred", "neg", "minus", "s"])
    arity = sig.arity(name)
    return EApp(name, tuple(random_expr(rng, sig, depth - 1, vars) for _ in range(arity)))


def test_congruence_soundness(sig):
    # Val(e) = Val(normalize(e)) under every valuation
    rng = random.Random(42)
    for _ in range(300):
        e = random_expr(rng, sig, rng.randint(1, 5))
        rho = {"x": rng.randint(0, 8), "y": rng.randint(0, 8)}
        assert eval_expr(e, rho, sig) == eval_expr(normalize_expr(e, sig), rho, sig)


def _rewrite_positions(e, sig):
    """All (path, reduct) pairs for one rewriting step."""
    out = []

    def go(cur, path):
        if isinstance(cur, EApp):
            sym = sig.symbols.get(cur.symbol)
            if sym is not None and sym.equations:
                m = _match_structural(sym, cur.args)
                if m is not None:
                    eq, env = m
                    from lamc.arith import expr_subst

                    out.append((path, expr_subst(eq.rhs, env)))
            for i, a in enumerate(cur.args):
                go(a, path + (i,))

    go(e, ())
    return out


def _replace(e, path, new):
    if not path:
        return new
    args = list(e.args)
    args[path[0]] = _replace(args[path[0]], path[1:], new)
    return EApp(e.symbol, tuple(args))


def test_termination_and_confluence_random_orders(sig):
    # every maximal rewrite sequence reaches the same normal form
    rng = random.Random(271)
    for _ in range(120):
        e = random_expr(rng, sig, rng.randint(1, 4))
        expected = normalize_expr(e, sig)
        cur = e
        for _ in range(10_000):
            options = _rewrite_positions(cur, sig)
            if not options:
                break
            path, new = rng.choice(options)
            cur = _replace(cur, path, new)
        else:
            pytest.fail(f"rewriting did not terminate from {e}")
        assert cur == expected
