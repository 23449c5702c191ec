import pytest

from lamc.arith import EApp, eval_expr, expr_of_nat
from lamc.demo import instruction_config, oracle_guesses
from lamc.extract import (
    ExtractionError,
    check_decider_samples,
    check_independence,
    check_refuter_samples,
    extract_decidable,
    extract_kamikaze,
    extract_naive,
    extract_sigma01,
    make_decider_sigma01,
    sigma01_refuter,
)
from lamc.machine import MachineConfig, run
from lamc.syntax import (
    BOTTOM,
    Inst,
    Kont,
    Lam,
    Numeral,
    Process,
    Var,
    parse_stack,
    parse_term,
    stack_of,
)


def demo_cfg(c):
    return instruction_config(c)


def realizer():
    return Inst("realizer")


def immediate_pair(n, justification=r"\z. z"):
    """A realizer delivering the pair (n, justification) right away."""
    return parse_term(rf"\u. u #{n} ({justification})")


class TestNaive:
    def test_direct_pair_gives_first_component(self, cfg):
        report = extract_naive(parse_term(r"\u. u #4 cc"), cfg)
        assert report.mode == "naive" and report.witness == 4
        assert report.verified is None  # no oracle supplied: no claim

    def test_demo_unverified(self):
        # the naive wrapper drops the justification; the first guess (0) is
        # wrong for the demo predicate and the oracle flags it
        cfg = demo_cfg(10)
        oracle = lambda n: eval_expr(EApp("fleq", (expr_of_nat(n),)), {}, cfg.sig) == 0
        report = extract_naive(realizer(), cfg, oracle=oracle)
        assert report.witness == 0
        assert report.verified is False

    def test_stuck_run_has_no_witness(self, cfg):
        report = extract_naive(Lam("u", Var("u")), cfg)
        assert report.witness is None and report.outcome.halt.kind == "stuck"


class TestSigma01:
    def test_immediate_correct_pair(self, cfg):
        # f = pred: pred(3) != 0... use n with pred(n) = 0, i.e. n in {0, 1}
        report = extract_sigma01(immediate_pair(1), "pred", cfg)
        assert report.witness == 1 and report.verified is True

    def test_immediate_wrong_pair_detected(self, cfg):
        report = extract_sigma01(immediate_pair(3), "pred", cfg)
        assert report.witness == 3 and report.verified is False

    def test_demo_sigma01(self):
        for c in (5, 10, 50, 1000):
            cfg = demo_cfg(c)
            report = extract_sigma01(realizer(), "fleq", cfg)
            witness, _ = oracle_guesses(c)
            assert report.witness == witness
            assert report.verified is True
            assert report.guesses == ()

    def test_demo_tracing_variant_records_guesses(self):
        cfg = demo_cfg(10)
        report = extract_sigma01(realizer(), "fleq", cfg, trace_guesses=True)
        witness, guesses = oracle_guesses(10)
        assert report.witness == witness
        assert list(report.guesses) == guesses

    def test_requires_unary_symbol(self, cfg):
        with pytest.raises(ExtractionError):
            extract_sigma01(immediate_pair(0), "minus", cfg)

    def test_fuel_exhaustion_reported(self):
        cfg = MachineConfig(fuel=20)
        omega = parse_term(r"(\x. x x) (\x. x x)")
        report = extract_sigma01(Lam("u", omega), "pred", cfg)
        assert report.witness is None
        assert report.outcome.halt.kind == "fuel"


class TestDecider:
    def test_decider_contract(self, cfg, sig):
        d = make_decider_sigma01("pred", cfg)
        for n in range(31):
            p = Process(d, stack_of(Numeral(n), parse_term("stop #1"), parse_term("stop #0")))
            expected = 1 if eval_expr(EApp("pred", (expr_of_nat(n),)), {}, cfg.sig) == 0 else 0
            assert run(p, cfg).halt.value == expected

    def test_decider_spot_check(self, cfg):
        d = make_decider_sigma01("pred", cfg)
        oracle = lambda n: n <= 1  # pred(n) = 0 iff n <= 1
        assert check_decider_samples(d, oracle, list(range(12)), cfg)
        not_a_decider = parse_term(r"\n u v. u")
        assert not check_decider_samples(not_a_decider, oracle, [0, 5], cfg)

    def test_decidable_extraction_matches_sigma01(self):
        cfg = demo_cfg(10)
        d = make_decider_sigma01("fleq", cfg)
        oracle = lambda n: eval_expr(EApp("fleq", (expr_of_nat(n),)), {}, cfg.sig) == 0
        report = extract_decidable(realizer(), d, sigma01_refuter(), oracle, cfg)
        expected = extract_sigma01(realizer(), "fleq", cfg)
        assert report.witness == expected.witness
        assert report.verified is True

    def test_correct_first_pair_uses_no_refutation(self, cfg):
        # register d and r as instructions so their calls show in the stats
        from lamc.machine import macro_rule, register_batch

        d = make_decider_sigma01("pred", cfg)
        cfg2 = register_batch(
            cfg, {"dec": [macro_rule("dec", d)], "ref": [macro_rule("ref", sigma01_refuter())]}
        )
        oracle = lambda n: n <= 1
        report = extract_decidable(immediate_pair(0), Inst("dec"), Inst("ref"), oracle, cfg2)
        assert report.witness == 0 and report.verified is True
        assert report.outcome.stats.get("dec", 0) == 1
        assert report.outcome.stats.get("ref", 0) == 0

    def test_one_backtrack_on_wrong_then_right_pair(self, cfg):
        # a hand-built realizer that proposes 3 (wrong for pred) and, when
        # refuted, backtracks to propose 1
        from lamc.machine import macro_rule, register_batch

        t0 = parse_term(r"\u. cc (\k. u #3 (\w. k (u #1 (\z. z))))")
        d = make_decider_sigma01("pred", cfg)
        cfg2 = register_batch(
            cfg, {"dec": [macro_rule("dec", d)], "ref": [macro_rule("ref", sigma01_refuter())]}
        )
        oracle = lambda n: n <= 1
        report = extract_decidable(t0, Inst("dec"), Inst("ref"), oracle, cfg2)
        assert report.witness == 1 and report.verified is True
        assert report.outcome.stats["dec"] == 2
        assert report.outcome.stats["ref"] == 1
        assert report.outcome.stats["Resume"] == 1


class TestKamikaze:
    def test_demo_prints_guesses_then_crashes(self):
        for c in (5, 10):
            cfg = demo_cfg(c)
            report = extract_kamikaze(realizer(), sigma01_refuter(), cfg)
            witness, guesses = oracle_guesses(c)
            assert list(report.guesses) == guesses
            assert report.witness == witness  # last printed guess
            assert report.outcome.halt.kind == "stuck"

    def test_single_correct_guess(self, cfg):
        report = extract_kamikaze(immediate_pair(1), sigma01_refuter(), cfg)
        assert report.guesses == (1,)
        assert report.witness == 1

    def test_oracle_early_stop(self):
        cfg = demo_cfg(10)
        oracle = lambda n: eval_expr(EApp("fleq", (expr_of_nat(n),)), {}, cfg.sig) == 0
        report = extract_kamikaze(realizer(), sigma01_refuter(), cfg, oracle=oracle)
        witness, guesses = oracle_guesses(10)
        assert list(report.guesses) == guesses
        assert report.witness == witness and report.verified is True
        assert report.outcome.halt.kind == "aborted"

    def test_fuel_exhaustion_without_prints(self):
        cfg = MachineConfig(fuel=20)
        omega = parse_term(r"(\x. x x) (\x. x x)")
        report = extract_kamikaze(Lam("u", omega), sigma01_refuter(), cfg)
        assert report.witness is None and report.guesses == ()

    def test_agreement_with_sigma01_tracing(self):
        cfg = demo_cfg(10)
        kam = extract_kamikaze(realizer(), sigma01_refuter(), cfg)
        sig01 = extract_sigma01(realizer(), "fleq", cfg, trace_guesses=True)
        assert kam.guesses == sig01.guesses


class TestRefuterCheck:
    def test_sigma01_refuter_passes(self, cfg):
        oracle = lambda n: n == 0
        assert check_refuter_samples(sigma01_refuter(), oracle, list(range(1, 10)), cfg)

    def test_stop_like_refuter_fails(self, cfg):
        bad = parse_term(r"\n z. stop n")  # "refutes" by final-stopping
        oracle = lambda n: False
        assert not check_refuter_samples(bad, oracle, [1, 2], cfg)


class TestIndependence:
    def stacks(self, cfg):
        insts = cfg.instructions
        return [
            parse_stack(r"(\x. x) . $", instructions=insts),
            parse_stack(r"#9 . (\x. x) . $", instructions=insts),
            parse_stack("stop . cc . $", instructions=insts),
        ]

    def test_demo_witness_is_stack_independent(self):
        cfg = demo_cfg(10)
        report = check_independence(realizer(), self.stacks(cfg), cfg)
        witness, _ = oracle_guesses(10)
        assert report.independent
        assert all(w == witness for _, w in report.witnesses)

    def test_trivial_realizer(self, cfg):
        report = check_independence(immediate_pair(3), self.stacks(cfg), cfg)
        assert report.independent
        assert all(w == 3 for _, w in report.witnesses)

    def test_rejects_non_proof_like(self, cfg):
        with pytest.raises(ExtractionError, match="proof-like"):
            check_independence(Lam("u", Kont(BOTTOM)), [], cfg)
