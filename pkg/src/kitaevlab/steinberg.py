"""Steinberg words over S0, rewrite moves, and a proof-script checker.

A word is a tuple of generators ``x_ij(s)`` with indices in {1, 2, 3}.  Each
rewrite move is an instance of a Steinberg relation; the checker applies a
script's moves in order and demands generator-exact equality with the target.

Words are interpreted in the stable Steinberg group, where the kernel of the
map to elementary matrices is central.  Two moves act on the symbol rather
than the word: ``perm`` relabels indices (conjugation by a lifted
permutation, trivial on central elements) and ``subst`` applies a ring
endomorphism of S0, which is used together with the symbol identity
``{u, v} = {v^-1, u}``.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from kitaevlab.symring import (
    ONE,
    ZERO,
    RingElement,
    RingSyntaxError,
    check_kitaev_pair,
    is_unit,
    render,
    ring_inverse,
    ring_parse,
    substitute,
    u_pow,
    v_pow,
)

N = 3

STEP_KINDS = (
    "merge", "split", "swap", "push-inner", "push-inner-inv", "push-outer",
    "push-outer-inv", "delzero", "inszero", "rotate", "perm", "subst",
)
_POSITIONAL = {"merge", "split", "swap", "push-inner", "push-inner-inv",
               "push-outer", "push-outer-inv", "delzero", "inszero"}


class StepError(ValueError):
    pass


class IllegalStep(StepError):
    pass


class PositionOutOfRange(StepError):
    pass


class ScriptSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class StGenerator:
    i: int
    j: int
    arg: RingElement

    def __post_init__(self):
        if not (1 <= self.i <= N and 1 <= self.j <= N):
            raise ValueError(f"indices must lie in 1..{N}, got x{self.i}{self.j}")
        if self.i == self.j:
            raise ValueError("generator indices must differ")

    def __str__(self) -> str:
        return f"x{self.i}{self.j}({render(self.arg)})"


Word = tuple  # tuple[StGenerator, ...]


def x(i: int, j: int, arg) -> StGenerator:
    if isinstance(arg, str):
        arg = ring_parse(arg)
    return StGenerator(i, j, RingElement.coerce(arg))


def st_inverse(w: Sequence[StGenerator]) -> Word:
    return tuple(StGenerator(g.i, g.j, -g.arg) for g in reversed(w))


def whitehead_d(i: int, j: int, w: RingElement) -> Word:
    """Word x_ji(w^-1) x_ij(1-w) x_ji(-1) x_ij(1-w^-1) lifting diag(w at i, w^-1 at j)."""
    if i == j:
        raise ValueError("whitehead_d needs distinct indices")
    if not is_unit(w):
        raise ValueError(f"{render(w)} is not a unit of S0")
    winv = ring_inverse(w)
    return (StGenerator(j, i, winv), StGenerator(i, j, ONE - w),
            StGenerator(j, i, -ONE), StGenerator(i, j, ONE - winv))


def steinberg_symbol_word(u: RingElement = u_pow(1), v: RingElement = v_pow(1)) -> Word:
    d12 = whitehead_d(1, 2, u)
    d13 = whitehead_d(1, 3, v)
    return d12 + d13 + st_inverse(d12) + st_inverse(d13)


# --- matrix image -----------------------------------------------------------

def identity_matrix() -> tuple:
    return tuple(tuple(ONE if r == c else ZERO for c in range(N)) for r in range(N))


def st_matrix_image(w: Iterable[StGenerator]) -> tuple:
    """Product of elementary matrices e_ij(s) over S0 (3x3, tuple of rows)."""
    m = [list(row) for row in identity_matrix()]
    for g in w:
        # right multiplication by e_ij(s): column j += column i * s
        i, j, s = g.i - 1, g.j - 1, g.arg
        for r in range(N):
            a = m[r][i]
            if a:
                m[r][j] = m[r][j] + a * s
    return tuple(tuple(row) for row in m)


def is_identity(m) -> bool:
    return m == identity_matrix()


def image_fingerprint(m) -> str:
    text = ";".join(",".join(render(e) for e in row) for row in m)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def permute_matrix(m, sigma: Sequence[int]) -> tuple:
    """Matrix with entry (sigma(r), sigma(c)) equal to m[r][c]."""
    out = [[ZERO] * N for _ in range(N)]
    for r in range(N):
        for c in range(N):
            out[sigma[r] - 1][sigma[c] - 1] = m[r][c]
    return tuple(tuple(row) for row in out)


def substitute_matrix(m, u_image: RingElement, v_image: RingElement) -> tuple:
    return tuple(tuple(substitute(e, u_image, v_image) for e in row) for row in m)


# --- steps ------------------------------------------------------------------

@dataclass(frozen=True)
class ProofStep:
    kind: str
    position: int | None = None
    split: tuple[RingElement, RingElement] | None = None
    indices: tuple[int, int] | None = None
    offset: int | None = None
    perm: tuple[int, int, int] | None = None
    units: tuple[RingElement, RingElement] | None = None
    expect: Word | None = None

    def __post_init__(self):
        if self.kind not in STEP_KINDS:
            raise ValueError(f"unknown step kind {self.kind!r}")
        if self.kind in _POSITIONAL and self.position is None:
            raise ValueError(f"{self.kind} needs a position")
        if self.kind == "split" and self.split is None:
            raise ValueError("split needs two arguments")
        if self.kind == "inszero" and self.indices is None:
            raise ValueError("inszero needs generator indices")
        if self.kind == "rotate" and self.offset is None:
            raise ValueError("rotate needs an offset")
        if self.kind == "perm":
            if self.perm is None or sorted(self.perm) != list(range(1, N + 1)):
                raise ValueError("perm needs a bijection of {1, 2, 3}")
        if self.kind == "subst" and self.units is None:
            raise ValueError("subst needs images of u and v")

    def __str__(self) -> str:
        return render_step(self)


def _at(w: Word, p: int, span: int) -> None:
    if p < 1 or p + span - 1 > len(w):
        raise PositionOutOfRange(
            f"position {p} needs {span} generator(s) in a word of length {len(w)}")


def _push_inner(g: StGenerator, h: StGenerator) -> StGenerator:
    # x_ij(S) x_jk(T) = x_ik(ST) x_jk(T) x_ij(S), i != k
    if g.j != h.i or g.i == h.j:
        raise IllegalStep(f"push-inner needs x_ij x_jk with i != k, got {g} {h}")
    return StGenerator(g.i, h.j, g.arg * h.arg)


def _push_outer(g: StGenerator, h: StGenerator) -> StGenerator:
    # x_ji(S) x_kj(T) = x_ki(-TS) x_kj(T) x_ji(S), i != k
    if g.i != h.j or g.j == h.i:
        raise IllegalStep(f"push-outer needs x_ji x_kj with i != k, got {g} {h}")
    return StGenerator(h.i, g.j, -(h.arg * g.arg))


def apply_step(w: Sequence[StGenerator], s: ProofStep, level: str = "strict") -> Word:
    if level not in ("strict", "det"):
        raise ValueError(f"unknown level {level!r}")
    w = tuple(w)
    k, p = s.kind, s.position

    if k == "merge":
        _at(w, p, 2)
        g, h = w[p - 1], w[p]
        if (g.i, g.j) != (h.i, h.j):
            raise IllegalStep(f"merge needs equal indices, got {g} {h}")
        return w[:p - 1] + (StGenerator(g.i, g.j, g.arg + h.arg),) + w[p + 1:]

    if k == "split":
        _at(w, p, 1)
        g = w[p - 1]
        a, b = s.split
        if a + b != g.arg:
            raise IllegalStep(f"split parts {render(a)} | {render(b)} do not sum to {render(g.arg)}")
        return w[:p - 1] + (StGenerator(g.i, g.j, a), StGenerator(g.i, g.j, b)) + w[p:]

    if k == "swap":
        _at(w, p, 2)
        g, h = w[p - 1], w[p]
        if g.i == h.j or g.j == h.i:
            raise IllegalStep(f"swap needs distinct inner and outer indices, got {g} {h}")
        return w[:p - 1] + (h, g) + w[p + 1:]

    if k in ("push-inner", "push-outer"):
        _at(w, p, 2)
        g, h = w[p - 1], w[p]
        c = _push_inner(g, h) if k == "push-inner" else _push_outer(g, h)
        return w[:p - 1] + (c, h, g) + w[p + 1:]

    if k in ("push-inner-inv", "push-outer-inv"):
        _at(w, p, 3)
        c, h, g = w[p - 1], w[p], w[p + 1]
        want = _push_inner(g, h) if k == "push-inner-inv" else _push_outer(g, h)
        if c != want:
            raise IllegalStep(f"{k} expects correction {want}, found {c}")
        return w[:p - 1] + (g, h) + w[p + 2:]

    if k == "delzero":
        _at(w, p, 1)
        if not w[p - 1].arg.is_zero():
            raise IllegalStep(f"delzero needs argument 0, got {w[p - 1]}")
        return w[:p - 1] + w[p:]

    if k == "inszero":
        if p < 1 or p > len(w) + 1:
            raise PositionOutOfRange(f"cannot insert at {p} in a word of length {len(w)}")
        i, j = s.indices
        return w[:p - 1] + (StGenerator(i, j, ZERO),) + w[p - 1:]

    if k == "rotate":
        if level == "strict" and not is_identity(st_matrix_image(w)):
            raise IllegalStep("rotate needs a central word: matrix image is not the identity")
        if not w:
            return w
        r = s.offset % len(w)
        return w[r:] + w[:r]

    if k == "perm":
        sigma = s.perm
        return tuple(StGenerator(sigma[g.i - 1], sigma[g.j - 1], g.arg) for g in w)

    if k == "subst":
        uu, vv = s.units
        try:
            check_kitaev_pair(uu, vv)
        except ValueError as exc:
            raise IllegalStep(str(exc)) from None
        return tuple(StGenerator(g.i, g.j, substitute(g.arg, uu, vv)) for g in w)

    raise IllegalStep(f"unhandled step kind {k!r}")


def image_after(step: ProofStep, image):
    """Expected matrix image after ``step`` given the image before it."""
    if step.kind == "perm":
        return permute_matrix(image, step.perm)
    if step.kind == "subst":
        return substitute_matrix(image, *step.units)
    return image


# --- scripts ----------------------------------------------------------------

@dataclass(frozen=True)
class ProofScript:
    start: Word
    steps: tuple[ProofStep, ...]
    target: Word
    level: str = "strict"


@dataclass
class CheckReport:
    passed: bool
    failed_step: int | None = None
    reason: str | None = None
    expected: str | None = None
    actual: str | None = None
    lengths: list[int] = field(default_factory=list)
    start_fingerprint: str = ""
    target_fingerprint: str = ""
    rotations_verified: int = 0

    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "failed_step": self.failed_step,
            "reason": self.reason,
            "expected": self.expected,
            "actual": self.actual,
            "lengths": list(self.lengths),
            "start_fingerprint": self.start_fingerprint,
            "target_fingerprint": self.target_fingerprint,
            "rotations_verified": self.rotations_verified,
        }


def render_word(w: Sequence[StGenerator]) -> str:
    return " ".join(str(g) for g in w) if w else "()"


_GEN = re.compile(r"x(\d)(\d)\(")


def parse_word(text: str, line: int = 1, col0: int = 1) -> Word:
    out = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        if text.startswith("()", pos) and not out:
            pos += 2
            continue
        m = _GEN.match(text, pos)
        if m is None:
            raise ScriptSyntaxError("expected generator xij(...)", line, col0 + pos)
        i, j = int(m.group(1)), int(m.group(2))
        if not (1 <= i <= N and 1 <= j <= N) or i == j:
            raise ScriptSyntaxError(f"bad generator indices x{i}{j} (n={N})", line, col0 + pos)
        close = text.find(")", m.end())
        if close < 0:
            raise ScriptSyntaxError("unclosed generator argument", line, col0 + m.end())
        inner = text[m.end():close]
        try:
            arg = ring_parse(inner)
        except RingSyntaxError as exc:
            raise ScriptSyntaxError(str(exc), line, col0 + m.end() + exc.position) from None
        out.append(StGenerator(i, j, arg))
        pos = close + 1
    return tuple(out)


def render_step(s: ProofStep) -> str:
    k = s.kind
    if k == "split":
        a, b = s.split
        return f"split @{s.position} {render(a)} | {render(b)}"
    if k == "inszero":
        return f"inszero @{s.position} x{s.indices[0]}{s.indices[1]}"
    if k == "rotate":
        return f"rotate k={s.offset}"
    if k == "perm":
        return "perm ({} {} {})".format(*s.perm)
    if k == "subst":
        return f"subst u->{render(s.units[0])} v->{render(s.units[1])}"
    return f"{k} @{s.position}"


_STEP = re.compile(r"(?P<kind>[a-z-]+)\s*(?P<rest>.*)$")
_POS = re.compile(r"@(\d+)\s*")


def _parse_unit(text: str, line: int, col: int) -> RingElement:
    try:
        e = ring_parse(text)
    except RingSyntaxError as exc:
        raise ScriptSyntaxError(str(exc), line, col + exc.position) from None
    if not is_unit(e):
        raise ScriptSyntaxError(f"{text.strip()!r} is not a unit", line, col)
    return e


def parse_step(text: str, line: int = 1, col0: int = 1) -> ProofStep:
    m = _STEP.match(text)
    if m is None or m.group("kind") not in STEP_KINDS:
        raise ScriptSyntaxError(f"unknown step {text.split()[0] if text.split() else text!r}",
                                line, col0)
    kind, rest = m.group("kind"), m.group("rest")
    rcol = col0 + m.start("rest")
    pos = None
    if kind in _POSITIONAL:
        pm = _POS.match(rest)
        if pm is None:
            raise ScriptSyntaxError(f"{kind} needs a position '@p'", line, rcol)
        pos = int(pm.group(1))
        rcol += pm.end()
        rest = rest[pm.end():]
    rest_s = rest.strip()
    try:
        if kind == "split":
            if rest_s.count("|") != 1:
                raise ScriptSyntaxError("split needs '<arg> | <arg>'", line, rcol)
            left, right = rest.split("|")
            try:
                a, b = ring_parse(left), ring_parse(right)
            except RingSyntaxError as exc:
                raise ScriptSyntaxError(str(exc), line, rcol) from None
            return ProofStep(kind, pos, split=(a, b))
        if kind == "inszero":
            gm = re.fullmatch(r"x(\d)(\d)", rest_s)
            if gm is None:
                raise ScriptSyntaxError("inszero needs generator indices 'xij'", line, rcol)
            i, j = int(gm.group(1)), int(gm.group(2))
            if not (1 <= i <= N and 1 <= j <= N) or i == j:
                raise ScriptSyntaxError(f"bad generator indices x{i}{j} (n={N})", line, rcol)
            return ProofStep(kind, pos, indices=(i, j))
        if kind == "rotate":
            km = re.fullmatch(r"k\s*=\s*(-?\d+)", rest_s)
            if km is None:
                raise ScriptSyntaxError("rotate needs 'k=<int>'", line, rcol)
            return ProofStep(kind, offset=int(km.group(1)))
        if kind == "perm":
            pm = re.fullmatch(r"\(\s*(\d)\s+(\d)\s+(\d)\s*\)", rest_s)
            if pm is None:
                raise ScriptSyntaxError("perm needs '(s1 s2 s3)'", line, rcol)
            sigma = tuple(int(g) for g in pm.groups())
            if sorted(sigma) != [1, 2, 3]:
                raise ScriptSyntaxError("perm is not a bijection of {1, 2, 3}", line, rcol)
            return ProofStep(kind, perm=sigma)
        if kind == "subst":
            sm = re.fullmatch(r"u\s*->\s*(.+?)\s+v\s*->\s*(.+)", rest_s)
            if sm is None:
                raise ScriptSyntaxError("subst needs 'u-><unit> v-><unit>'", line, rcol)
            uu = _parse_unit(sm.group(1), line, rcol)
            vv = _parse_unit(sm.group(2), line, rcol)
            return ProofStep(kind, units=(uu, vv))
        if rest_s:
            raise ScriptSyntaxError(f"unexpected text after {kind}: {rest_s!r}", line, rcol)
        return ProofStep(kind, pos)
    except ValueError as exc:
        if isinstance(exc, ScriptSyntaxError):
            raise
        raise ScriptSyntaxError(str(exc), line, rcol) from None


def script_parse(text: str) -> ProofScript:
    start = target = None
    level = "strict"
    steps: list[ProofStep] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        head, sep, rest = stripped.partition(":")
        if sep and head in ("start", "target", "level", "expect"):
            rcol = col + len(head) + 1
            if head == "level":
                if rest.strip() not in ("strict", "det"):
                    raise ScriptSyntaxError("level must be 'strict' or 'det'", lineno, rcol)
                level = rest.strip()
                continue
            word = parse_word(rest, lineno, rcol)
            if head == "start":
                start = word
            elif head == "target":
                target = word
            else:
                if not steps:
                    raise ScriptSyntaxError("expect: must follow a step", lineno, col)
                last = steps[-1]
                steps[-1] = ProofStep(**{**last.__dict__, "expect": word})
            continue
        steps.append(parse_step(stripped, lineno, col))
    if start is None:
        raise ScriptSyntaxError("missing 'start:' header", 1, 1)
    if target is None:
        raise ScriptSyntaxError("missing 'target:' header", 1, 1)
    return ProofScript(start, tuple(steps), target, level)


def script_render(script: ProofScript) -> str:
    lines = [f"start: {render_word(script.start)}",
             f"target: {render_word(script.target)}",
             f"level: {script.level}"]
    for s in script.steps:
        lines.append(render_step(s))
        if s.expect is not None:
            lines.append(f"expect: {render_word(s.expect)}")
    return "\n".join(lines) + "\n"


BUILTINS = ("prop22", "thm32")


def builtin_text(name: str) -> str:
    name = name.removeprefix("builtin:")
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin script {name!r}; choose from {', '.join(BUILTINS)}")
    return resources.files("kitaevlab").joinpath("scripts", f"{name}.st").read_text()


def load_builtin(name: str) -> ProofScript:
    return script_parse(builtin_text(name))


def check_script(script: ProofScript, level: str | None = None) -> CheckReport:
    level = level or script.level
    start_img = st_matrix_image(script.start)
    report = CheckReport(
        passed=False,
        start_fingerprint=image_fingerprint(start_img),
        target_fingerprint=image_fingerprint(st_matrix_image(script.target)),
    )
    for name, w in (("start", script.start), ("target", script.target)):
        if any(g.arg.is_zero() for g in w):
            report.failed_step = 0
            report.reason = f"{name} word contains a zero argument"
            return report

    w = script.start
    report.lengths.append(len(w))
    for n, step in enumerate(script.steps, 1):
        try:
            w = apply_step(w, step, level)
        except StepError as exc:
            report.failed_step = n
            report.reason = f"{render_step(step)}: {exc}"
            return report
        if step.kind == "rotate" and level == "strict":
            report.rotations_verified += 1
        report.lengths.append(len(w))
        if step.expect is not None and w != step.expect:
            report.failed_step = n
            report.reason = f"checkpoint mismatch after {render_step(step)}"
            report.expected = render_word(step.expect)
            report.actual = render_word(w)
            return report

    if w != script.target:
        report.failed_step = len(script.steps)
        report.reason = "final word differs from target"
        report.expected = render_word(script.target)
        report.actual = render_word(w)
        return report
    report.passed = True
    return report
