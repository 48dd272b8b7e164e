"""Parser and matrix builder for permutation-invariant Pauli-tensor Hamiltonians.

Expression grammar (whitespace insensitive)::

    expr   := [sign] term (sign term)*
    sign   := '+' | '-'
    term   := [coeff '*'] body
    body   := 'sym(' factor+ ')'
            | factor ('x' factor)*
            | 'H(' digit ',' digit ')'
    coeff  := decimal | decimal '/' decimal
            | '1/sqrt(' decimal ')' | 'sqrt(' decimal ')'
    factor := 'I' | 'X' | 'Y' | 'Z' | 'P0' | 'P1'

``sym(...)`` expands to the sum over all distinct arrangements of its
factor list (each arrangement once); ``H(i, j)`` is the symmetrized
two-qubit pair (s_i x s_j + s_j x s_i)/2 over I, X, Y, Z with indices
0..3.  All bodies in one expression must act on the same number of
qubits.  This grammar is also the wire format of the CLI
``--hamiltonian`` flag.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExpressionSemanticError, ExpressionSyntaxError, ResourceError

__all__ = [
    "TensorTerm",
    "SymTerm",
    "PairTerm",
    "HamiltonianExpr",
    "HermitianOperator",
    "parse",
    "pretty",
    "build_matrix",
    "FACTORS",
]

FACTORS = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
    "P0": np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.complex128),
    "P1": np.array([[0.0, 0.0], [0.0, 1.0]], dtype=np.complex128),
}

_PAULI = ("I", "X", "Y", "Z")


@dataclass(frozen=True)
class TensorTerm:
    coeff: float
    factors: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class SymTerm:
    coeff: float
    factors: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class PairTerm:
    coeff: float
    i: int
    j: int

    @property
    def arity(self) -> int:
        return 2


Term = TensorTerm | SymTerm | PairTerm


@dataclass(frozen=True)
class HamiltonianExpr:
    terms: tuple[Term, ...]

    @property
    def arity(self) -> int:
        return self.terms[0].arity


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<sym>[-+*/(),])"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | sym | end
    text: str
    line: int
    column: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError("unrecognized character", line, col, src[pos])
        text = m.group(0)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise ExpressionSyntaxError(f"expected {want!r}", tok.line, tok.column, tok.text)
        return self.advance()

    # coeff := decimal | decimal '/' decimal | '1/sqrt(' d ')' | 'sqrt(' d ')'
    def coefficient(self) -> float:
        tok = self.peek()
        if tok.kind == "name" and tok.text == "sqrt":
            self.advance()
            self.expect("sym", "(")
            num = float(self.expect("number").text)
            self.expect("sym", ")")
            return math.sqrt(num)
        value = float(self.expect("number").text)
        if self.peek().kind == "sym" and self.peek().text == "/":
            self.advance()
            nxt = self.peek()
            if nxt.kind == "name" and nxt.text == "sqrt":
                self.advance()
                self.expect("sym", "(")
                num = float(self.expect("number").text)
                self.expect("sym", ")")
                return value / math.sqrt(num)
            return value / float(self.expect("number").text)
        return value

    def factor(self) -> str:
        tok = self.expect("name")
        if tok.text not in FACTORS:
            raise ExpressionSyntaxError("unknown factor", tok.line, tok.column, tok.text)
        return tok.text

    def body(self, coeff: float) -> Term:
        tok = self.peek()
        if tok.kind == "name" and tok.text == "sym":
            self.advance()
            self.expect("sym", "(")
            factors = [self.factor()]
            while self.peek().kind == "name":
                factors.append(self.factor())
            self.expect("sym", ")")
            return SymTerm(coeff, tuple(factors))
        if tok.kind == "name" and tok.text == "H":
            self.advance()
            self.expect("sym", "(")
            i_tok = self.expect("number")
            self.expect("sym", ",")
            j_tok = self.expect("number")
            self.expect("sym", ")")
            try:
                i, j = int(i_tok.text), int(j_tok.text)
            except ValueError:
                raise ExpressionSyntaxError(
                    "pair indices must be integers", i_tok.line, i_tok.column, i_tok.text
                ) from None
            if not (0 <= i <= 3 and 0 <= j <= 3):
                raise ExpressionSemanticError(
                    "pair indices must lie in 0..3", i_tok.line, i_tok.column, f"{i},{j}"
                )
            return PairTerm(coeff, i, j)
        factors = [self.factor()]
        while self.peek().kind == "name" and self.peek().text == "x":
            self.advance()
            factors.append(self.factor())
        return TensorTerm(coeff, tuple(factors))

    def term(self, sign: float) -> Term:
        tok = self.peek()
        # a leading number or sqrt means an explicit coefficient follows
        if tok.kind == "number" or (tok.kind == "name" and tok.text == "sqrt"):
            coeff = self.coefficient()
            self.expect("sym", "*")
            return self.body(sign * coeff)
        return self.body(sign * 1.0)

    def expression(self) -> HamiltonianExpr:
        terms = []
        sign = 1.0
        tok = self.peek()
        if tok.kind == "sym" and tok.text in "+-":
            self.advance()
            sign = -1.0 if tok.text == "-" else 1.0
        first = self.peek()
        terms.append((first, self.term(sign)))
        while self.peek().kind != "end":
            op = self.expect("sym")
            if op.text not in "+-":
                raise ExpressionSyntaxError("expected '+' or '-'", op.line, op.column, op.text)
            sign = -1.0 if op.text == "-" else 1.0
            nxt = self.peek()
            if nxt.kind == "sym" and nxt.text in "+-":
                self.advance()
                sign *= -1.0 if nxt.text == "-" else 1.0
            start = self.peek()
            terms.append((start, self.term(sign)))
        arity = terms[0][1].arity
        for start, t in terms[1:]:
            if t.arity != arity:
                raise ExpressionSemanticError(
                    f"term acts on {t.arity} qubits but the expression acts on {arity}",
                    start.line,
                    start.column,
                    start.text,
                )
        return HamiltonianExpr(tuple(t for _, t in terms))


def parse(src: str) -> HamiltonianExpr:
    """Parse a Hamiltonian expression; see the module docstring for the grammar."""
    return _Parser(src).expression()


def _fmt_coeff(c: float) -> str:
    return repr(float(abs(c)))


def _body_text(term: Term) -> str:
    if isinstance(term, SymTerm):
        return f"sym({' '.join(term.factors)})"
    if isinstance(term, PairTerm):
        return f"H({term.i},{term.j})"
    return " x ".join(term.factors)


def pretty(expr: HamiltonianExpr) -> str:
    """Render an expression so that parse(pretty(e)) == e."""
    parts = []
    for idx, term in enumerate(expr.terms):
        sign = "-" if term.coeff < 0 else "+"
        body = _body_text(term)
        text = body if abs(term.coeff) == 1.0 else f"{_fmt_coeff(term.coeff)}*{body}"
        if idx == 0:
            parts.append(text if sign == "+" else f"-{text}")
        else:
            parts.append(f" {sign} {text}")
    return "".join(parts)


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix on n qubits, qubit 0 = most significant bit."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (2**self.n, 2**self.n):
            raise DomainError(f"matrix shape {m.shape} does not match {self.n} qubits")
        deficit = float(np.abs(m - m.conj().T).max())
        if deficit > 1e-12:
            raise DomainError(f"matrix is not Hermitian (deficit {deficit:.3e})")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def _kron_chain(factors: tuple[str, ...]) -> np.ndarray:
    out = FACTORS[factors[0]]
    for name in factors[1:]:
        out = np.kron(out, FACTORS[name])
    return out


def build_matrix(expr: HamiltonianExpr) -> HermitianOperator:
    """Dense matrix of an expression; qubit counts above 14 are rejected."""
    n = expr.arity
    if n > 14:
        raise ResourceError(f"dense matrices limited to 14 qubits, got {n}")
    dim = 2**n
    total = np.zeros((dim, dim), dtype=np.complex128)
    for term in expr.terms:
        if isinstance(term, PairTerm):
            si, sj = _PAULI[term.i], _PAULI[term.j]
            block = 0.5 * (_kron_chain((si, sj)) + _kron_chain((sj, si)))
        elif isinstance(term, SymTerm):
            # distinct arrangements only, in sorted order for determinism
            arrangements = sorted(set(itertools.permutations(term.factors)))
            block = np.zeros((dim, dim), dtype=np.complex128)
            for arr in arrangements:
                block += _kron_chain(arr)
        else:
            block = _kron_chain(term.factors)
        total += term.coeff * block
    return HermitianOperator(n, total)
