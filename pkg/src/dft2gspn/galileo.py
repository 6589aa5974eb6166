"""Reader and writer for the Galileo-style textual fault tree format.

One `;`-terminated statement per line:

    toplevel "<name>";
    "<name>" <gatetype> "<child>" ... ;
    "<name>" lambda=<rate> dorm=<factor>;
    "<name>" failed;

Gate types: and, or, <k>of<n>, pand[_incl|_excl], por[_incl|_excl], spare,
wsp, csp, hsp, fdep, pdep=<p>, seq, mutex.  Bare pand/por select the
inclusive variant.  `//` starts a comment.  Names are either bare words over
[A-Za-z0-9_] or double-quoted strings (any characters, including Unicode).
The passive failure rate of a basic event is dorm * lambda; dorm defaults
to 1 when omitted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import dft as _dft


@dataclass(frozen=True)
class SourceSpan:
    line: int         # 1-based
    column: int       # 1-based
    length: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    span: SourceSpan
    message: str

    def __str__(self) -> str:
        return f"{self.span}: {self.message}"


class GalileoParseError(ValueError):
    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)


_BARE_NAME = re.compile(r"[A-Za-z0-9_]+\Z")
_VOTE = re.compile(r"(\d+)of(\d+)\Z")
_GATE_WORDS = {
    "and", "or", "pand", "pand_incl", "pand_excl", "por", "por_incl",
    "por_excl", "spare", "wsp", "csp", "hsp", "fdep", "seq", "mutex",
}


@dataclass(frozen=True)
class _Token:
    text: str
    span: SourceSpan
    quoted: bool


def _tokenize_line(line: str, lineno: int, diags: list):
    tokens = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in " \t\r":
            i += 1
            continue
        if line.startswith("//", i):
            break
        if ch == ";":
            tokens.append(_Token(";", SourceSpan(lineno, i + 1, 1), False))
            i += 1
            continue
        if ch == '"':
            j = line.find('"', i + 1)
            if j < 0:
                diags.append(
                    Diagnostic(SourceSpan(lineno, i + 1, n - i), "unterminated string")
                )
                return tokens
            tokens.append(
                _Token(line[i + 1:j], SourceSpan(lineno, i + 1, j - i + 1), True)
            )
            i = j + 1
            continue
        j = i
        while j < n and line[j] not in ' \t\r";' and not line.startswith("//", j):
            j += 1
        tokens.append(_Token(line[i:j], SourceSpan(lineno, i + 1, j - i), False))
        i = j
    return tokens


def _parse_number(tok: _Token, what: str, diags: list) -> Optional[float]:
    try:
        value = float(tok.text)
    except ValueError:
        diags.append(Diagnostic(tok.span, f"malformed {what} {tok.text!r}"))
        return None
    if value != value or value in (float("inf"), float("-inf")):
        diags.append(Diagnostic(tok.span, f"{what} must be finite"))
        return None
    return value


class _Statement:
    __slots__ = ("tokens", "span")

    def __init__(self, tokens):
        self.tokens = tokens
        self.span = tokens[0].span


def parse_galileo(text: str) -> _dft.Dft:
    """Parse a fault tree, raising GalileoParseError with located diagnostics."""
    dft, errors, _ = parse_galileo_diagnostics(text)
    if errors:
        raise GalileoParseError(errors)
    return dft


def parse_galileo_diagnostics(text: str):
    """Full-fidelity entry point: (Dft or None, errors, warnings)."""
    diags: list = []
    warnings: list = []
    statements = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = _tokenize_line(line, lineno, diags)
        if not tokens:
            continue
        if tokens[-1].text != ";" or tokens[-1].quoted:
            diags.append(
                Diagnostic(tokens[-1].span, "statement must end with ';'")
            )
            continue
        body = tokens[:-1]
        if any(t.text == ";" and not t.quoted for t in body):
            diags.append(
                Diagnostic(tokens[0].span, "one statement per line")
            )
            continue
        if body:
            statements.append(_Statement(body))

    top: Optional[_Token] = None
    defined: dict = {}            # name -> (span, kind marker)
    order: list = []              # declaration order of node names
    gates: dict = {}              # name -> (NodeType, [child names], span)
    be_rates: dict = {}           # name -> (lambda, dorm, span)
    spare_style: dict = {}        # spare name -> wsp|csp|hsp|spare
    failed: list = []             # (name token)

    def define(tok: _Token):
        if tok.text in defined:
            diags.append(
                Diagnostic(tok.span, f"duplicate definition of {tok.text!r}")
            )
            return False
        if not tok.quoted and not _BARE_NAME.match(tok.text):
            diags.append(
                Diagnostic(tok.span, f"bare name {tok.text!r} must match [A-Za-z0-9_]+")
            )
            return False
        defined[tok.text] = tok.span
        order.append(tok.text)
        return True

    for st in statements:
        body = st.tokens
        head = body[0]
        if not head.quoted and head.text == "toplevel":
            if len(body) != 2:
                diags.append(Diagnostic(head.span, "toplevel expects exactly one name"))
                continue
            if top is not None:
                diags.append(Diagnostic(head.span, "duplicate toplevel declaration"))
                continue
            top = body[1]
            continue

        if len(body) < 2:
            diags.append(Diagnostic(head.span, "incomplete statement"))
            continue
        second = body[1]

        if not second.quoted and second.text == "failed":
            if len(body) != 2:
                diags.append(Diagnostic(second.span, "failed takes no arguments"))
                continue
            failed.append(head)
            continue

        if not second.quoted and second.text.startswith("lambda="):
            lam = _parse_number(
                _Token(second.text[len("lambda="):], second.span, False),
                "rate",
                diags,
            )
            dorm = 1.0
            ok = lam is not None
            for extra in body[2:]:
                if not extra.quoted and extra.text.startswith("dorm="):
                    d = _parse_number(
                        _Token(extra.text[len("dorm="):], extra.span, False),
                        "dormancy factor",
                        diags,
                    )
                    if d is None:
                        ok = False
                    else:
                        dorm = d
                else:
                    diags.append(
                        Diagnostic(extra.span, f"unexpected token {extra.text!r}")
                    )
                    ok = False
            if ok and lam is not None and lam <= 0:
                diags.append(Diagnostic(second.span, "rate must be positive"))
                ok = False
            if ok and dorm < 0:
                diags.append(Diagnostic(second.span, "dormancy factor must be >= 0"))
                ok = False
            if ok and define(head):
                be_rates[head.text] = (lam, dorm, head.span)
            continue

        # A gate definition.
        gate_word = second.text
        children = body[2:]
        ntype = None
        style = None
        if second.quoted:
            diags.append(Diagnostic(second.span, f"unknown gate type {gate_word!r}"))
            continue
        if gate_word in ("and",):
            ntype = _dft.AND_T
        elif gate_word == "or":
            ntype = _dft.OR_T
        elif gate_word in ("pand", "pand_incl"):
            ntype = _dft.pand(inclusive=True)
        elif gate_word == "pand_excl":
            ntype = _dft.pand(inclusive=False)
        elif gate_word in ("por", "por_incl"):
            ntype = _dft.por(inclusive=True)
        elif gate_word == "por_excl":
            ntype = _dft.por(inclusive=False)
        elif gate_word in ("spare", "wsp", "csp", "hsp"):
            ntype = _dft.spare()
            style = gate_word
        elif gate_word == "fdep":
            ntype = _dft.FDEP_T
        elif gate_word == "seq":
            ntype = _dft.SEQ_T
        elif gate_word == "mutex":
            ntype = _dft.MUTEX_T
        elif gate_word.startswith("pdep="):
            p = _parse_number(
                _Token(gate_word[len("pdep="):], second.span, False),
                "probability",
                diags,
            )
            if p is None:
                continue
            if not 0.0 <= p <= 1.0:
                diags.append(Diagnostic(second.span, "probability must lie in [0, 1]"))
                continue
            ntype = _dft.pdep(p)
        elif _VOTE.match(gate_word):
            k, n_declared = map(int, _VOTE.match(gate_word).groups())
            if k < 1 or k > n_declared:
                diags.append(
                    Diagnostic(second.span, f"vote threshold {k} of {n_declared} is impossible")
                )
                continue
            if n_declared != len(children):
                diags.append(
                    Diagnostic(
                        second.span,
                        f"vote declares {n_declared} inputs but lists {len(children)} children",
                    )
                )
                continue
            ntype = _dft.vot(k)
        else:
            diags.append(Diagnostic(second.span, f"unknown gate type {gate_word!r}"))
            continue

        for c in children:
            if not c.quoted and not _BARE_NAME.match(c.text):
                diags.append(
                    Diagnostic(c.span, f"bare name {c.text!r} must match [A-Za-z0-9_]+")
                )
        if define(head):
            gates[head.text] = (ntype, [c.text for c in children], head.span)
            if style:
                spare_style[head.text] = style

    if top is None:
        diags.append(Diagnostic(SourceSpan(1, 1, 0), "missing toplevel declaration"))
    if diags:
        return None, diags, warnings

    raw_nodes = []
    for name in order:
        if name in gates:
            ntype, children, _ = gates[name]
            raw_nodes.append((name, ntype, children))
        else:
            lam, dorm, _ = be_rates[name]
            raw_nodes.append((name, _dft.be(lam, dorm * lam), ()))

    evidence = []
    for tok in failed:
        if tok.text not in defined:
            diags.append(Diagnostic(tok.span, f"failed names unknown node {tok.text!r}"))
        else:
            evidence.append(tok.text)
    if top.text not in defined:
        diags.append(Diagnostic(top.span, f"toplevel names unknown node {top.text!r}"))
    if diags:
        return None, diags, warnings

    try:
        tree = _dft.build_dft(raw_nodes, top.text, evidence)
    except _dft.InvalidDftError as exc:
        for issue in exc.report.errors:
            span = SourceSpan(1, 1, 0)
            if issue.node is not None and issue.node < len(order):
                name = order[issue.node]
                span = gates.get(name, be_rates.get(name, (None, None, span)))[2]
            diags.append(Diagnostic(span, str(issue)))
        return None, diags, warnings

    for name, style in spare_style.items():
        expected = {"csp": 0.0, "hsp": 1.0}.get(style)
        if expected is None:
            continue
        sp = tree.node(name)
        for c in sp.children:
            child = tree.node(c)
            if child.kind != _dft.BE:
                continue
            dorm = child.type.passive_rate / child.type.active_rate
            if abs(dorm - expected) > 1e-12:
                warnings.append(
                    Diagnostic(
                        gates[name][2],
                        f"{style} {name!r} conventionally has dorm={expected:g} "
                        f"children, but {child.name!r} has dorm={dorm:g}",
                    )
                )
    return tree, [], warnings


def _quote(name: str) -> str:
    return f'"{name}"'


def _gate_word(node: _dft.DftNode) -> str:
    t = node.type
    if t.kind == _dft.AND:
        return "and"
    if t.kind == _dft.OR:
        return "or"
    if t.kind == _dft.VOT:
        return f"{t.k}of{len(node.children)}"
    if t.kind == _dft.PAND:
        return "pand" if t.inclusive else "pand_excl"
    if t.kind == _dft.POR:
        return "por" if t.inclusive else "por_excl"
    if t.kind == _dft.SPARE:
        return "spare"
    if t.kind == _dft.FDEP:
        return "fdep"
    if t.kind == _dft.PDEP:
        return f"pdep={t.p!r}"
    if t.kind == _dft.SEQ:
        return "seq"
    if t.kind == _dft.MUTEX:
        return "mutex"
    raise ValueError(f"cannot serialise node kind {t.kind}")


def serialize_galileo(tree: _dft.Dft) -> str:
    """Render a tree so that re-parsing yields an isomorphic Dft."""
    lines = [f"toplevel {_quote(tree.node(tree.top).name)};"]
    for node in tree.nodes:
        if node.kind == _dft.BE:
            lam = node.type.active_rate
            dorm = node.type.passive_rate / lam
            lines.append(f"{_quote(node.name)} lambda={lam!r} dorm={dorm!r};")
        else:
            children = " ".join(_quote(tree.node(c).name) for c in node.children)
            lines.append(f"{_quote(node.name)} {_gate_word(node)} {children};")
    for v in sorted(tree.evidence):
        lines.append(f"{_quote(tree.node(v).name)} failed;")
    return "\n".join(lines) + "\n"
