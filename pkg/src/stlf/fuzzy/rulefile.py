"""Plain-text rule bases, one rule per line.

    IF load IS VL AND temp IS C THEN out IS L
    IF load IS VL AND temp IS C THEN f = 0.1 + 0.5*load + -0.02*temp

Blank lines and ``#`` comments are skipped. A line ``[name]`` starts a
named section when several rule bases share one file. Coefficients are
written with ``repr`` so parsing returns the identical floats.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

from ..errors import RuleSyntaxError
from .rules import MamdaniRule, TsRule

_CONJUNCT = re.compile(r"^(\S+) IS (\S+)$")
_SECTION = re.compile(r"^\[(.+)\]$")


def format_rule(rule) -> str:
    ante = " AND ".join(f"{var} IS {label}" for var, label in rule.antecedent)
    if isinstance(rule, MamdaniRule):
        return f"IF {ante} THEN {rule.consequent[0]} IS {rule.consequent[1]}"
    q = rule.coefficients
    terms = [repr(q[0])] + [f"{qk!r}*{var}" for qk, (var, _) in zip(q[1:], rule.antecedent)]
    return f"IF {ante} THEN f = {' + '.join(terms)}"


def format_rules(rules: Iterable) -> str:
    return "".join(format_rule(r) + "\n" for r in rules)


def parse_rule(line: str, lineno: int = 1):
    text = line.strip()
    if not text.startswith("IF "):
        raise RuleSyntaxError(lineno, "rule must start with 'IF '")
    try:
        ante_text, cons_text = text[3:].split(" THEN ", 1)
    except ValueError:
        raise RuleSyntaxError(lineno, "missing ' THEN '") from None
    antecedent = []
    for part in ante_text.split(" AND "):
        m = _CONJUNCT.match(part.strip())
        if not m:
            raise RuleSyntaxError(lineno, f"bad conjunct {part!r}")
        antecedent.append((m.group(1), m.group(2)))
    cons_text = cons_text.strip()
    if cons_text.startswith("f = "):
        terms = cons_text[4:].split(" + ")
        try:
            coeffs = [float(terms[0])]
            for term, (var, _) in zip(terms[1:], antecedent):
                q, name = term.split("*", 1)
                if name != var:
                    raise RuleSyntaxError(lineno, f"coefficient for {name!r} out of antecedent order")
                coeffs.append(float(q))
        except ValueError:
            raise RuleSyntaxError(lineno, f"bad linear consequent {cons_text!r}") from None
        if len(terms) != len(antecedent) + 1:
            raise RuleSyntaxError(lineno, "one coefficient per antecedent variable plus a constant expected")
        return TsRule(tuple(antecedent), tuple(coeffs))
    m = _CONJUNCT.match(cons_text)
    if not m:
        raise RuleSyntaxError(lineno, f"bad consequent {cons_text!r}")
    return MamdaniRule(tuple(antecedent), (m.group(1), m.group(2)))


def parse_rules(text: str) -> list:
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if _SECTION.match(line):
            raise RuleSyntaxError(lineno, "unexpected section header; use parse_rulebases")
        rules.append(parse_rule(line, lineno))
    return rules


def format_rulebases(bases: Mapping[str, Iterable]) -> str:
    return "".join(f"[{name}]\n" + format_rules(rules) for name, rules in bases.items())


def parse_rulebases(text: str) -> dict[str, list]:
    bases: dict[str, list] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        m = _SECTION.match(line)
        if m:
            current = m.group(1)
            bases.setdefault(current, [])
            continue
        if current is None:
            raise RuleSyntaxError(lineno, "rule outside any [section]")
        bases[current].append(parse_rule(line, lineno))
    return bases
