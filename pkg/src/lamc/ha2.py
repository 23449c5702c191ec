"""The intuitionistic term language and its reduction theory.

Terms are pure lambda-terms enriched with the constants pair, fst, snd,
z0 (zero), sc (successor) and rec.  Weak reduction contracts beta, rec and
projection redexes anywhere except under an abstraction; inner reduction
is weak reduction under at least one abstraction.  The bounded equality
check for the inner-equivalence relation and the witness reader live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .syntax import LamcError, ParseError, _TokenStream, _lex, fresh_name


class Ha2Error(LamcError):
    pass


CONSTANTS = ("pair", "fst", "snd", "z0", "sc", "rec")


class HTerm:
    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, HTerm) and hterm_key(self) == hterm_key(other)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(hterm_key(self))

    def __str__(self) -> str:
        return print_hterm(self)


_EMPTY = frozenset()


@dataclass(frozen=True, eq=False, slots=True)
class HVar(HTerm):
    name: str
    fv: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", frozenset((self.name,)))


@dataclass(frozen=True, eq=False, slots=True)
class HLam(HTerm):
    binder: str
    body: HTerm
    fv: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", self.body.fv - {self.binder})


@dataclass(frozen=True, eq=False, slots=True)
class HApp(HTerm):
    fn: HTerm
    arg: HTerm
    fv: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", self.fn.fv | self.arg.fv)


@dataclass(frozen=True, eq=False, slots=True)
class HConst(HTerm):
    kind: str
    fv: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in CONSTANTS:
            raise ValueError(f"unknown constant {self.kind!r}")
        object.__setattr__(self, "fv", _EMPTY)


PAIR_C = HConst("pair")
FST = HConst("fst")
SND = HConst("snd")
Z0 = HConst("z0")
SC = HConst("sc")
REC = HConst("rec")


def happ(*terms: HTerm) -> HTerm:
    t = terms[0]
    for u in terms[1:]:
        t = HApp(t, u)
    return t


def hlam(binders: str, body: HTerm) -> HTerm:
    for b in reversed(binders.split()):
        body = HLam(b, body)
    return body


def hpair(a: HTerm, b: HTerm) -> HTerm:
    return happ(PAIR_C, a, b)


def hnumeral(n: int) -> HTerm:
    """The numeral spine sc (sc (... z0)) as genuine nested applications."""
    t: HTerm = Z0
    for _ in range(n):
        t = HApp(SC, t)
    return t


def hnumeral_value(t: HTerm) -> int | None:
    """Inverse of hnumeral on exact spines."""
    n = 0
    while True:
        match t:
            case HApp(HConst("sc"), inner):
                n += 1
                t = inner
            case HConst("z0"):
                return n
            case _:
                return None


def split_pair(t: HTerm) -> tuple[HTerm, HTerm] | None:
    match t:
        case HApp(HApp(HConst("pair"), a), b):
            return a, b
    return None


# ---------------------------------------------------------------------------
# alpha machinery


def hterm_key(t: HTerm, env: dict | None = None, depth: int = 0):
    env = env or {}
    match t:
        case HVar(name):
            b = env.get(name)
            return ("b", b) if b is not None else ("f", name)
        case HLam(binder, body):
            env2 = dict(env)
            env2[binder] = depth
            return ("l", hterm_key(body, env2, depth + 1))
        case HApp(fn, arg):
            return ("a", hterm_key(fn, env, depth), hterm_key(arg, env, depth))
        case HConst(kind):
            return ("c", kind)
    raise TypeError(f"not an HA2 term: {t!r}")


def hterm_free_vars(t: HTerm) -> frozenset[str]:
    return t.fv


def hterm_is_closed(t: HTerm) -> bool:
    return not hterm_free_vars(t)


def hsubstitute(t: HTerm, x: str, u: HTerm) -> HTerm:
    if x not in t.fv:
        return t
    match t:
        case HVar(_):
            return u
        case HLam(binder, body):
            if binder in u.fv:
                renamed = fresh_name(binder, u.fv | body.fv | {x})
                body = hsubstitute(body, binder, HVar(renamed))
                return HLam(renamed, hsubstitute(body, x, u))
            return HLam(binder, hsubstitute(body, x, u))
        case HApp(fn, arg):
            return HApp(hsubstitute(fn, x, u), hsubstitute(arg, x, u))
        case _:
            return t


# ---------------------------------------------------------------------------
# weak reduction


def contract_redex(t: HTerm) -> HTerm | None:
    """Contract t when t itself is a beta, projection or rec redex."""
    match t:
        case HApp(HLam(x, body), u):
            return hsubstitute(body, x, u)
        case HApp(HConst("fst"), p):
            ab = split_pair(p)
            return ab[0] if ab else None
        case HApp(HConst("snd"), p):
            ab = split_pair(p)
            return ab[1] if ab else None
        case HApp(HApp(HApp(HConst("rec"), u0), u1), v):
            if v == Z0:
                return u0
            match v:
                case HApp(HConst("sc"), w):
                    return happ(u1, w, happ(REC, u0, u1, w))
            return None
    return None


Pos = tuple[int, ...]


def _replace_at(t: HTerm, pos: Pos, new: HTerm) -> HTerm:
    if not pos:
        return new
    assert isinstance(t, HApp)
    if pos[0] == 0:
        return HApp(_replace_at(t.fn, pos[1:], new), t.arg)
    return HApp(t.fn, _replace_at(t.arg, pos[1:], new))


def weak_step(t: HTerm) -> tuple[HTerm, Pos] | None:
    """Contract the leftmost-outermost weak redex; None when weak-normal.

    Weak reduction never goes below an abstraction.
    """
    found = _lo_weak(t, ())
    if found is None:
        return None
    pos, reduct = found
    return _replace_at(t, pos, reduct), pos


def _lo_weak(t: HTerm, pos: Pos) -> tuple[Pos, HTerm] | None:
    r = contract_redex(t)
    if r is not None:
        return pos, r
    if isinstance(t, HApp):
        left = _lo_weak(t.fn, pos + (0,))
        if left is not None:
            return left
        return _lo_weak(t.arg, pos + (1,))
    return None


def enumerate_weak_redexes(t: HTerm) -> list[tuple[Pos, HTerm]]:
    """All one-step weak reducts (full nondeterministic relation)."""
    out: list[tuple[Pos, HTerm]] = []

    def go(u: HTerm, pos: Pos) -> None:
        r = contract_redex(u)
        if r is not None:
            out.append((pos, _replace_at(t, pos, r)))
        if isinstance(u, HApp):
            go(u.fn, pos + (0,))
            go(u.arg, pos + (1,))

    go(t, ())
    return out


def weak_reduce(t: HTerm, fuel: int = 10_000) -> tuple[HTerm, int]:
    """Iterate leftmost-outermost weak steps to weak-normal form or fuel."""
    steps = 0
    while steps < fuel:
        nxt = weak_step(t)
        if nxt is None:
            return t, steps
        t = nxt[0]
        steps += 1
    raise Ha2Error(f"weak_reduce: fuel exhausted after {fuel} steps")


def is_weak_normal(t: HTerm) -> bool:
    return _lo_weak(t, ()) is None


# ---------------------------------------------------------------------------
# inner reduction (weak steps under at least one lambda)


def enumerate_inner_successors(t: HTerm) -> list[HTerm]:
    out: list[HTerm] = []

    def go(u: HTerm, pos: Pos, under: bool) -> None:
        if under:
            r = contract_redex(u)
            if r is not None:
                out.append(_replace_at_deep(t, pos, r))
        match u:
            case HLam(_, body):
                go(body, pos + (2,), True)
            case HApp(fn, arg):
                go(fn, pos + (0,), under)
                go(arg, pos + (1,), under)
            case _:
                pass

    go(t, (), False)
    return out


def _replace_at_deep(t: HTerm, pos: Pos, new: HTerm) -> HTerm:
    """Like _replace_at but the path may cross abstractions (index 2)."""
    if not pos:
        return new
    head, rest = pos[0], pos[1:]
    if head == 2:
        assert isinstance(t, HLam)
        return HLam(t.binder, _replace_at_deep(t.body, rest, new))
    assert isinstance(t, HApp)
    if head == 0:
        return HApp(_replace_at_deep(t.fn, rest, new), t.arg)
    return HApp(t.fn, _replace_at_deep(t.arg, rest, new))


def full_step(t: HTerm) -> HTerm | None:
    """One full (weak-or-inner) reduction step, projection-friendly order.

    Projection redexes whose argument is already a pair are contracted
    first (they are needed and never duplicate work); otherwise the
    leftmost-outermost redex, descending into abstraction bodies.
    """
    proj = _find_proj(t, ())
    if proj is not None:
        pos, r = proj
        return _replace_at_deep(t, pos, r)
    found = _lo_full(t, ())
    if found is None:
        return None
    pos, r = found
    return _replace_at_deep(t, pos, r)


def _find_proj(t: HTerm, pos: Pos) -> tuple[Pos, HTerm] | None:
    match t:
        case HApp(HConst("fst" | "snd"), p) if split_pair(p) is not None:
            return pos, contract_redex(t)
        case HApp(fn, arg):
            left = _find_proj(fn, pos + (0,))
            if left is not None:
                return left
            return _find_proj(arg, pos + (1,))
        case HLam(_, body):
            return _find_proj(body, pos + (2,))
    return None


def _lo_full(t: HTerm, pos: Pos) -> tuple[Pos, HTerm] | None:
    r = contract_redex(t)
    if r is not None:
        return pos, r
    match t:
        case HApp(fn, arg):
            left = _lo_full(fn, pos + (0,))
            if left is not None:
                return left
            return _lo_full(arg, pos + (1,))
        case HLam(_, body):
            inner = _lo_full(body, pos + (2,))
            if inner is not None:
                return inner
    return None


# ---------------------------------------------------------------------------
# bounded inner equality


class EqResult(Enum):
    EQUAL = "equal"
    NOT_EQUAL = "not-equal"
    UNKNOWN = "unknown"


def inner_equal(t: HTerm, u: HTerm, fuel: int = 10_000) -> EqResult:
    """Bounded check of the inner-equivalence relation.

    Inner reduction never changes the top constructor of a term, so the
    relation decomposes: applications are compared componentwise, while
    abstraction bodies are related by full conversion, decided here by a
    bounded joinability search (projection-friendly normal order).  EQUAL
    verdicts always come from an exhibited join; UNKNOWN is first-class.
    """
    budget = [fuel]
    return _ieq(t, u, budget)


def _ieq(t: HTerm, u: HTerm, budget: list[int]) -> EqResult:
    if hterm_key(t) == hterm_key(u):
        return EqResult.EQUAL
    if budget[0] <= 0:
        return EqResult.UNKNOWN
    match t, u:
        case (HApp(f1, a1), HApp(f2, a2)):
            left = _ieq(f1, f2, budget)
            if left is EqResult.NOT_EQUAL:
                return left
            right = _ieq(a1, a2, budget)
            if right is EqResult.NOT_EQUAL:
                return right
            if left is EqResult.EQUAL and right is EqResult.EQUAL:
                return EqResult.EQUAL
            return EqResult.UNKNOWN
        case (HLam(x1, b1), HLam(x2, b2)):
            z = fresh_name("v", hterm_free_vars(b1) | hterm_free_vars(b2) | {x1, x2})
            b1 = hsubstitute(b1, x1, HVar(z))
            b2 = hsubstitute(b2, x2, HVar(z))
            return _join_full(b1, b2, budget)
        case _:
            # inner reduction never changes the top constructor, so terms
            # with different shapes (or different constants/variables) are
            # definitely not related
            return EqResult.NOT_EQUAL


def _join_full(a: HTerm, b: HTerm, budget: list[int]) -> EqResult:
    """Joinability under full reduction via two normalizing chains."""
    seen_a = {hterm_key(a)}
    seen_b = {hterm_key(b)}
    cur_a, cur_b = a, b
    done_a = done_b = False
    while budget[0] > 0:
        if hterm_key(cur_a) in seen_b or hterm_key(cur_b) in seen_a:
            return EqResult.EQUAL
        if done_a and done_b:
            return (
                EqResult.EQUAL
                if hterm_key(cur_a) == hterm_key(cur_b)
                else EqResult.NOT_EQUAL
            )
        if not done_a:
            budget[0] -= 1
            nxt = full_step(cur_a)
            if nxt is None:
                done_a = True
            else:
                cur_a = nxt
                seen_a.add(hterm_key(cur_a))
        if not done_b:
            budget[0] -= 1
            nxt = full_step(cur_b)
            if nxt is None:
                done_b = True
            else:
                cur_b = nxt
                seen_b.add(hterm_key(cur_b))
    return EqResult.UNKNOWN


# ---------------------------------------------------------------------------
# weak-head evaluation (iterative; used by the witness reader)


@dataclass(frozen=True)
class _HeadState:
    focus: HTerm
    frames: tuple
    steps: int
    blocked: bool


def _head_run(t: HTerm, fuel: int) -> _HeadState:
    """Iterate head weak steps (the leftmost-outermost redex while one
    exists in head position), descending into strict argument positions of
    fst/snd/rec on demand.  Stops when head-blocked or out of fuel."""
    focus = t
    frames: list = []
    steps = 0
    while steps < fuel:
        match focus:
            case HApp(fn, arg):
                frames.append(("arg", arg))
                focus = fn
                continue
            case HLam(x, body):
                if frames and frames[-1][0] == "arg":
                    _, u = frames.pop()
                    focus = hsubstitute(body, x, u)
                    steps += 1
                    continue
                break
            case HConst("fst" | "snd") if frames and frames[-1][0] == "arg":
                kind = focus.kind
                _, u = frames.pop()
                frames.append((kind,))
                focus = u
                continue
            case HConst("pair") if (
                len(frames) >= 3
                and frames[-1][0] == "arg"
                and frames[-2][0] == "arg"
                and frames[-3][0] in ("fst", "snd")
            ):
                _, a = frames.pop()
                _, b = frames.pop()
                which = frames.pop()[0]
                focus = a if which == "fst" else b
                steps += 1
                continue
            case HConst("rec") if (
                len(frames) >= 3
                and frames[-1][0] == "arg"
                and frames[-2][0] == "arg"
                and frames[-3][0] == "arg"
            ):
                _, u0 = frames.pop()
                _, u1 = frames.pop()
                _, v = frames.pop()
                frames.append(("recarg", u0, u1))
                focus = v
                continue
            case HConst("z0") if frames and frames[-1][0] == "recarg":
                _, u0, _ = frames.pop()
                focus = u0
                steps += 1
                continue
            case HConst("sc") if (
                len(frames) >= 2 and frames[-1][0] == "arg" and frames[-2][0] == "recarg"
            ):
                _, w = frames.pop()
                _, u0, u1 = frames.pop()
                focus = happ(u1, w, happ(REC, u0, u1, w))
                steps += 1
                continue
            case _:
                break
        break
    return _HeadState(focus, tuple(frames), steps, steps < fuel)


def _rebuild(state: _HeadState) -> HTerm:
    t = state.focus
    for frame in reversed(state.frames):
        if frame[0] == "arg":
            t = HApp(t, frame[1])
        elif frame[0] in ("fst", "snd"):
            t = HApp(HConst(frame[0]), t)
        else:
            _, u0, u1 = frame
            t = happ(REC, u0, u1, t)
    return t


def weak_head_reduce(t: HTerm, fuel: int = 1_000_000) -> tuple[HTerm, int]:
    """Reduce to head-blocked form (head steps are leftmost-outermost)."""
    state = _head_run(t, fuel)
    if not state.blocked:
        raise Ha2Error(f"weak head reduction: fuel exhausted after {fuel} steps")
    return _rebuild(state), state.steps


def read_witness(t: HTerm, fuel: int = 2_000_000) -> tuple[int, HTerm] | None:
    """Weak-reduce a closed term toward a pair <s^n z0; u>; (n, u) on
    success, None when the head-normal form is not a pair.  Reduction
    stops as soon as the pair shape appears, so junk in the payload is
    never normalized."""
    state = _head_run(t, fuel)
    if not state.blocked:
        raise Ha2Error(f"read_witness: fuel exhausted after {fuel} steps")
    frames = state.frames
    if not (
        isinstance(state.focus, HConst)
        and state.focus.kind == "pair"
        and len(frames) == 2
        and frames[0][0] == "arg"
        and frames[1][0] == "arg"
    ):
        return None
    first, payload = frames[1][1], frames[0][1]
    budget = fuel - state.steps
    n = 0
    while True:
        st = _head_run(first, budget)
        if not st.blocked:
            raise Ha2Error("read_witness: fuel exhausted while reading the numeral")
        budget -= st.steps
        if isinstance(st.focus, HConst) and st.focus.kind == "z0" and not st.frames:
            return n, payload
        if (
            isinstance(st.focus, HConst)
            and st.focus.kind == "sc"
            and len(st.frames) == 1
            and st.frames[0][0] == "arg"
        ):
            n += 1
            first = st.frames[0][1]
            continue
        return None


# ---------------------------------------------------------------------------
# surface syntax


def parse_hterm(text: str) -> HTerm:
    ts = _TokenStream(_lex(text))
    t = _HParser(ts).term(frozenset())
    tok = ts.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)
    return t


class _HParser:
    def __init__(self, ts: _TokenStream):
        self.ts = ts

    def term(self, bound: frozenset[str]) -> HTerm:
        if self.ts.peek().text == "\\":
            self.ts.next()
            binders = []
            while self.ts.peek().kind == "ident":
                binders.append(self.ts.next().text)
            if not binders:
                raise self.ts.error("expected binders after '\\'")
            self.ts.expect(".")
            body = self.term(bound | frozenset(binders))
            for b in reversed(binders):
                body = HLam(b, body)
            return body
        t = self.atom(bound)
        if t is None:
            raise self.ts.error("expected a term")
        while True:
            u = self.atom(bound, optional=True)
            if u is None:
                return t
            t = HApp(t, u)

    def atom(self, bound: frozenset[str], optional: bool = False) -> HTerm | None:
        tok = self.ts.peek()
        if tok.kind == "ident":
            self.ts.next()
            if tok.text in CONSTANTS and tok.text not in bound:
                return HConst(tok.text)
            return HVar(tok.text)
        if tok.text == "(":
            self.ts.next()
            t = self.term(bound)
            self.ts.expect(")")
            return t
        if tok.text == "<":
            self.ts.next()
            a = self.term(bound)
            self.ts.expect(";")
            b = self.term(bound)
            self.ts.expect(">")
            return hpair(a, b)
        if tok.text == "\\":
            return self.term(bound)
        if optional:
            return None
        raise self.ts.error("expected a term")


def print_hterm(t: HTerm) -> str:
    return _ph(t, top=True)


def _ph(t: HTerm, top: bool) -> str:
    ab = split_pair(t)
    if ab is not None:
        return f"<{_ph(ab[0], True)}; {_ph(ab[1], True)}>"
    match t:
        case HVar(name):
            return name
        case HConst(kind):
            return kind
        case HLam(_, _):
            binders = []
            body = t
            while isinstance(body, HLam):
                binders.append(body.binder)
                body = body.body
            s = "\\" + " ".join(binders) + ". " + _ph(body, True)
            return s if top else "(" + s + ")"
        case HApp(_, _):
            parts = []
            fn = t
            while isinstance(fn, HApp) and split_pair(fn) is None:
                parts.append(fn.arg)
                fn = fn.fn
            parts.append(fn)
            parts.reverse()
            s = " ".join(_ph(p, False) for p in parts)
            return s if top else "(" + s + ")"
    raise TypeError(f"not an HA2 term: {t!r}")
