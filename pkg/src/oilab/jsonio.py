"""JSON plumbing: canonical dumps, atomic writes, exact probability strings.

Probabilities cross file boundaries as strings, not floats: a decimal string
when the value has a finite decimal expansion, a ``p/q`` string otherwise.
Python floats passed in from code are read as their shortest decimal
representation (``repr``), which is what a human typing ``0.1`` means.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from typing import Any

from .errors import ParseError


def as_exact_probability(value) -> Fraction:
    """Coerce a probability-like value to an exact Fraction in [0, 1]."""
    if isinstance(value, Fraction):
        frac = value
    elif isinstance(value, int):
        frac = Fraction(value)
    elif isinstance(value, float):
        frac = Fraction(repr(value))
    elif isinstance(value, str):
        try:
            frac = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"cannot parse probability {value!r}") from exc
    else:
        raise ParseError(f"cannot parse probability of type {type(value).__name__}")
    if not 0 <= frac <= 1:
        raise ParseError(f"probability {frac} outside [0, 1]")
    return frac


def fraction_to_string(frac: Fraction) -> str:
    """Exact decimal string when the denominator is 2^a·5^b, else 'p/q'."""
    den = frac.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{frac.numerator}/{frac.denominator}"
    shift = max(twos, fives)
    scaled = frac.numerator * 10 ** shift // frac.denominator
    if shift == 0:
        return str(scaled)
    digits = str(abs(scaled)).rjust(shift + 1, "0")
    sign = "-" if scaled < 0 else ""
    return f"{sign}{digits[:-shift]}.{digits[-shift:]}"


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def config_hash(obj: Any) -> str:
    """Short stable hash over a JSON-serializable configuration record."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".oilab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj: Any) -> None:
    atomic_write_text(path, canonical_dumps(obj))


def load_json(path: str) -> Any:
    try:
        with open(path) as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc


def require_field(obj: dict, key: str, context: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r} in {context}")
    return obj[key]
