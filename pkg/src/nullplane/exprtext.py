"""Prefix expression text format.

Grammar (whitespace separated, fully parenthesized)::

    expr := (one) | (gen NAME)
          | (+ expr ...) | (* expr ...)
          | (scal RATIONAL expr) | (z^ INT expr) | (exp expr)
          | (dexp RATIONAL expr)          ; (exp(c z e) - 1) / (c z)
          | (tensor expr expr ...)        ; one sub-expression per leg
          | (wedge expr expr)             ; a (x) b - b (x) a

``RATIONAL`` is ``p`` or ``p/q``.  ``(+)`` is zero.  Printing a normal form
and parsing it back gives the same element; printing that again gives the
same text.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ncpoly import (
    NCPolyError,
    NCSeries,
    PBWAlgebra,
    UnknownGeneratorError,
    divided_exp_series,
    exp_series,
)
from .tensor import TensorElement


class ParseError(NCPolyError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple
    pos: int


def _tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, i
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j], i
            i = j


_ARITY = {"one": (0, 0), "gen": (1, 1), "scal": (2, 2), "z^": (2, 2), "exp": (1, 1),
          "dexp": (2, 2), "wedge": (2, 2), "+": (0, None), "*": (1, None), "tensor": (1, None)}


def parse(text: str) -> Node:
    """Parse text into a syntax tree."""
    tokens = list(_tokenize(text))
    if not tokens:
        raise ParseError("empty expression", 0)
    node, k = _parse_at(tokens, 0, text)
    if k != len(tokens):
        raise ParseError("trailing input", tokens[k][1])
    return node


def _parse_at(tokens, k, text):
    tok, pos = tokens[k]
    if tok != "(":
        raise ParseError(f"expected '(' but found {tok!r}", pos)
    if k + 1 >= len(tokens):
        raise ParseError("unexpected end of input", len(text))
    op, opos = tokens[k + 1]
    if op not in _ARITY:
        raise ParseError(f"unknown operator {op!r}", opos)
    k += 2
    args: list = []
    while True:
        if k >= len(tokens):
            raise ParseError("unbalanced parentheses", len(text))
        tok, tpos = tokens[k]
        if tok == ")":
            k += 1
            break
        if tok == "(":
            child, k = _parse_at(tokens, k, text)
            args.append(child)
        else:
            args.append((tok, tpos))
            k += 1
    lo, hi = _ARITY[op]
    if len(args) < lo or (hi is not None and len(args) > hi):
        raise ParseError(f"wrong number of arguments for {op!r}", opos)
    if op == "gen":
        if not isinstance(args[0], tuple):
            raise ParseError("generator name expected", opos)
    elif op in ("scal", "z^", "dexp"):
        if not isinstance(args[0], tuple) or not isinstance(args[1], Node):
            raise ParseError(f"{op!r} takes a number and an expression", opos)
        atom, apos = args[0]
        try:
            value = int(atom) if op == "z^" else Fraction(atom)
        except ValueError:
            raise ParseError(f"bad number {atom!r}", apos) from None
        if op == "z^" and value < 0:
            raise ParseError("negative power of z", apos)
        args[0] = (value, apos)
    else:
        for a in args:
            if not isinstance(a, Node):
                raise ParseError(f"unexpected atom {a[0]!r}", a[1])
    return Node(op, tuple(args), pos), k


def evaluate(node: Node | str, legs: PBWAlgebra | Sequence[PBWAlgebra], order: int | None = None):
    """Evaluate a tree (or text) to an :class:`NCSeries` or, given several leg algebras, a :class:`TensorElement`."""
    if isinstance(node, str):
        node = parse(node)
    if isinstance(legs, PBWAlgebra):
        return _eval_series(node, legs, legs.order if order is None else order)
    legs = tuple(legs)
    if order is None:
        order = min(a.order for a in legs)
    if len(legs) == 1:
        return _eval_series(node, legs[0], order)
    return _eval_tensor(node, legs, order)


def _eval_series(node: Node, alg: PBWAlgebra, order: int) -> NCSeries:
    op, args = node.op, node.args
    if op == "one":
        return alg.one(order)
    if op == "gen":
        name, pos = args[0]
        try:
            return alg.gen(name, order)
        except UnknownGeneratorError:
            raise ParseError(f"unknown generator {name!r} in {alg.name}", pos) from None
    if op == "+":
        out = alg.zero(order)
        for a in args:
            out = out + _eval_series(a, alg, order)
        return out
    if op == "*":
        out = _eval_series(args[0], alg, order)
        for a in args[1:]:
            out = out * _eval_series(a, alg, order)
        return out
    if op == "scal":
        return _eval_series(args[1], alg, order) * args[0][0]
    if op == "z^":
        return _eval_series(args[1], alg, order).zshift(args[0][0])
    if op == "exp":
        return exp_series(_eval_series(args[0], alg, order))
    if op == "dexp":
        return divided_exp_series(_eval_series(args[1], alg, order), args[0][0])
    raise ParseError(f"{op!r} needs a tensor context", node.pos)


def _eval_tensor(node: Node, legs: tuple, order: int) -> TensorElement:
    op, args = node.op, node.args
    if op == "one":
        return TensorElement.identity(legs, order)
    if op == "tensor":
        if len(args) != len(legs):
            raise ParseError(f"tensor needs {len(legs)} legs, got {len(args)}", node.pos)
        return TensorElement.from_factors([_eval_series(a, alg, order) for a, alg in zip(args, legs)], order)
    if op == "wedge":
        if len(legs) != 2:
            raise ParseError("wedge is rank 2", node.pos)
        x = _eval_series(args[0], legs[0], order)
        y = _eval_series(args[1], legs[1], order)
        x2 = _eval_series(args[0], legs[1], order)
        y2 = _eval_series(args[1], legs[0], order)
        return TensorElement.from_factors([x, y], order) - TensorElement.from_factors([y2, x2], order)
    if op == "+":
        out = TensorElement(legs, {}, order)
        for a in args:
            out = out + _eval_tensor(a, legs, order)
        return out
    if op == "*":
        out = _eval_tensor(args[0], legs, order)
        for a in args[1:]:
            out = out * _eval_tensor(a, legs, order)
        return out
    if op == "scal":
        return _eval_tensor(args[1], legs, order) * args[0][0]
    if op == "z^":
        return _eval_tensor(args[1], legs, order).zshift(args[0][0])
    if op == "exp":
        return exp_series(_eval_tensor(args[0], legs, order))
    raise ParseError(f"{op!r} is not available for tensors", node.pos)


# -- printing ---------------------------------------------------------------


def _coeff_text(c) -> str:
    return str(c)


def word_to_text(names: Sequence[str], word) -> str:
    if not word:
        return "(one)"
    if len(word) == 1:
        return f"(gen {names[word[0]]})"
    return "(* " + " ".join(f"(gen {names[i]})" for i in word) + ")"


def _wrap(body: str, d: int, c) -> str:
    if d:
        body = f"(z^ {d} {body})"
    if c != 1:
        body = f"(scal {_coeff_text(c)} {body})"
    return body


def _sum(parts: list[str]) -> str:
    if not parts:
        return "(+)"
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def series_sort_key(key):
    d, w = key
    return (d, -len(w), w)


def series_to_text(s: NCSeries) -> str:
    names = s.algebra.alphabet.names
    return _sum([_wrap(word_to_text(names, w), d, c) for (d, w), c in
                 sorted(s.terms.items(), key=lambda kv: series_sort_key(kv[0]))])


def tensor_term_text(legs, key, c) -> str:
    d, ws = key
    body = "(tensor " + " ".join(word_to_text(a.alphabet.names, w) for a, w in zip(legs, ws)) + ")"
    return _wrap(body, d, c)


def tensor_sort_key(key):
    d, ws = key
    return (d, tuple((-len(w), w) for w in ws))


def tensor_to_text(t: TensorElement) -> str:
    return _sum([tensor_term_text(t.legs, k, c) for k, c in
                 sorted(t.terms.items(), key=lambda kv: tensor_sort_key(kv[0]))])


def sample_terms(element, limit: int = 5) -> list[str]:
    """Up to ``limit`` terms of a residual, lowest degree first, as expression text."""
    if hasattr(element, "sample_terms"):
        return element.sample_terms(limit)
    if isinstance(element, TensorElement):
        items = sorted(element.terms.items(), key=lambda kv: tensor_sort_key(kv[0]))[:limit]
        return [tensor_term_text(element.legs, k, c) for k, c in items]
    names = element.algebra.alphabet.names
    items = sorted(element.terms.items(), key=lambda kv: series_sort_key(kv[0]))[:limit]
    return [_wrap(word_to_text(names, w), d, c) for (d, w), c in items]
