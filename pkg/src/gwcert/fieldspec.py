"""Loading number fields from TOML spec files and parsing element strings.

A spec file carries min_poly (array of rational strings, constant term
first), optional precision, and the optional blocks for fields where the
automatic degree <= 2 machinery does not apply: integral_basis,
prime_splittings, fundamental_units, torsion_order, class_bound.
"""

from __future__ import annotations

import re
from fractions import Fraction

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .field import FieldElement, NumberField


def load_field(path: str) -> NumberField:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return field_from_dict(data)


def field_from_dict(data: dict) -> NumberField:
    poly = [Fraction(str(c)) for c in data["min_poly"]]
    nf = NumberField(poly, precision=int(data.get("precision", 30)))
    if "integral_basis" in data:
        nf._spec_integral_basis = [
            nf.element([Fraction(str(c)) for c in vec]) for vec in data["integral_basis"]
        ]
    if "prime_splittings" in data:
        nf._spec_splittings = {
            int(p): [
                {"e": int(ent["e"]), "f": int(ent["f"]), "root": int(ent["root"])}
                for ent in entries
            ]
            for p, entries in data["prime_splittings"].items()
        }
    if "fundamental_units" in data:
        units = [
            nf.element([Fraction(str(c)) for c in vec]) for vec in data["fundamental_units"]
        ]
        torsion_order = int(data.get("torsion_order", 2))
        torsion_gen = (
            nf.element([Fraction(str(c)) for c in data["torsion_gen"]])
            if "torsion_gen" in data
            else -nf.one
        )
        nf._spec_units = {
            "torsion_order": torsion_order,
            "torsion_gen": torsion_gen,
            "fundamental_units": units,
        }
    if "class_bound" in data:
        nf._spec_class_bound = int(data["class_bound"])
    return nf


_TERM = re.compile(r"^\s*([+-]?\s*[\d/]*)\s*(?:\*?\s*w(?:\^(\d+))?)?\s*$")


def parse_element(nf: NumberField, text: str) -> FieldElement:
    """Parse 'a+b*w' style strings: sums of rational terms and rational
    multiples of powers of w, e.g. '2', '-3/2', '1+2*w', 'w^2-1/2*w'."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty element string")
    # split into signed terms
    terms = re.findall(r"[+-]?[^+-]+", s)
    out = nf.zero
    w = nf.gen
    for term in terms:
        m = _TERM.match(term)
        if m is None:
            raise ValueError(f"cannot parse term {term!r} in {text!r}")
        coef_s, pow_s = m.group(1), m.group(2)
        has_w = "w" in term
        coef_s = coef_s.replace(" ", "")
        if coef_s in ("", "+"):
            coef = Fraction(1)
        elif coef_s == "-":
            coef = Fraction(-1)
        else:
            coef = Fraction(coef_s)
        if has_w:
            k = int(pow_s) if pow_s else 1
            out = out + nf.element(coef) * w**k
        else:
            out = out + nf.element(coef)
    return out
