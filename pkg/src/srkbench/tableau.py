"""Coefficient sets for additive-noise stochastic Runge-Kutta schemes.

A scheme is described by an extended Butcher array: weights ``alpha``,
stage matrix ``A`` with abscissae ``c = A 1``, and two stochastic weight
vectors ``b1``/``b2`` that couple the stages to the two blocks of driver
variables.  This module stores the built-in AN3D1 constants, parses user
coefficient files, and verifies both the 15 stochastic order conditions
(orders 1 to 3) and the classical deterministic conditions (orders 1 to 4)
by direct evaluation.

All condition evaluators use only ``np.dot`` and elementwise arithmetic,
so they work unchanged on object arrays of ``fractions.Fraction`` when an
exact rational check is wanted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

C_CONSISTENCY_TOL = 1e-12
DEFAULT_ORDER_TOL = 1e-9

# Right-hand sides of the stochastic order conditions.  Conditions 1-4 give
# weak order 2 on top of order 1 (condition 1); 5-15 complete order 3.
# Condition 15 constrains only the square of alpha.b2.
STOCHASTIC_RHS = {
    1: Fraction(1), 2: Fraction(1, 2), 3: Fraction(1, 2), 4: Fraction(1, 2),
    5: Fraction(1, 6), 6: Fraction(1, 3), 7: Fraction(1, 6), 8: Fraction(1, 6),
    9: Fraction(1, 6), 10: Fraction(1, 3), 11: Fraction(1, 3), 12: Fraction(1, 3),
    13: Fraction(1, 3), 14: Fraction(1, 3), 15: Fraction(1, 12),
}
STOCHASTIC_ORDER_CONDITIONS = {
    1: (1,),
    2: (1, 2, 3, 4),
    3: tuple(range(1, 16)),
}

DETERMINISTIC_RHS = {
    "D1": Fraction(1), "D2": Fraction(1, 2), "D3": Fraction(1, 3),
    "D4": Fraction(1, 6), "D5": Fraction(1, 4), "D6": Fraction(1, 8),
    "D7": Fraction(1, 12), "D8": Fraction(1, 24),
}
DETERMINISTIC_ORDER_CONDITIONS = {
    1: ("D1",),
    2: ("D1", "D2"),
    3: ("D1", "D2", "D3", "D4"),
    4: ("D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8"),
}


def _as_vector(x):
    arr = np.asarray(x)
    if arr.dtype != object:
        arr = arr.astype(float)
    return arr


@dataclass(frozen=True, eq=False)
class SrkTableau:
    """Immutable coefficient set of an s-stage scheme.

    ``c`` defaults to the row sums of ``A`` and, when given, must agree
    with them to within 1e-12.  ``explicit`` records whether ``A`` is
    strictly lower triangular, which the explicit stepper requires.
    """

    name: str
    alpha: np.ndarray
    A: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    c: np.ndarray | None = None
    s: int = field(init=False)
    explicit: bool = field(init=False)

    def __post_init__(self):
        alpha = _as_vector(self.alpha)
        A = _as_vector(self.A)
        b1 = _as_vector(self.b1)
        b2 = _as_vector(self.b2)
        s = alpha.shape[0]
        if alpha.ndim != 1:
            raise ValueError("alpha must be a vector")
        if A.shape != (s, s):
            raise ValueError(f"A must be {s}x{s}, got {A.shape}")
        for label, v in (("b1", b1), ("b2", b2)):
            if v.shape != (s,):
                raise ValueError(f"{label} must have length {s}, got {v.shape}")
        row_sums = A.dot(alpha * 0 + 1)
        if self.c is None:
            c = row_sums
        else:
            c = _as_vector(self.c)
            if c.shape != (s,):
                raise ValueError(f"c must have length {s}, got {c.shape}")
            dev = max(abs(ci - ri) for ci, ri in zip(c, row_sums))
            if dev > C_CONSISTENCY_TOL:
                raise ValueError(
                    f"c must equal the row sums of A (max deviation {float(dev):.3e})")
        explicit = all(
            A[i, j] == 0 for i in range(s) for j in range(i, s))
        for arr in (alpha, A, b1, b2, c):
            arr.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "explicit", explicit)


def an3d1():
    """The built-in four-stage scheme of weak order 3 (deterministic order 4)
    for additive noise of any dimension: two driver variables and four drift
    evaluations per step."""
    return SrkTableau(
        name="AN3D1",
        alpha=[1 / 6, -0.005430430675258792, 2 / 3, 0.1720970973419255],
        A=[
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [3 / 8, 1 / 8, 0.0, 0.0],
            [-0.4526683126055039, -0.4842227708685013, 1.9368910834740051, 0.0],
        ],
        b1=[-0.01844540496323970, 0.8017012756521233,
            0.5092227024816198, 0.9758794209767762],
        b2=[-0.1866426386543421, -0.8575745885712401,
            -0.4723392695015512, 0.3060354860326548],
        c=[0.0, 1.0, 0.5, 1.0],
    )


def euler_maruyama_tableau():
    """Euler-Maruyama written as a one-stage tableau (weak order 1)."""
    return SrkTableau(name="EM", alpha=[1.0], A=[[0.0]], b1=[0.0], b2=[0.0])


def stochastic_residuals(t: SrkTableau):
    """Left minus right hand side of the 15 stochastic conditions.

    Vector products are componentwise; condition 15 is evaluated on the
    squared quantity, so both signs of alpha.b2 are admissible.
    """
    alpha, A, b1, b2 = t.alpha, t.A, t.b1, t.b2
    one = alpha * 0 + 1
    e = A.dot(one)
    bb = b1 * b1 + b2 * b2
    lhs = {
        1: np.dot(alpha, one),
        2: np.dot(alpha, e),
        3: np.dot(alpha, bb),
        4: np.dot(alpha, b1),
        5: np.dot(alpha, A.dot(e)),
        6: np.dot(alpha, e * e),
        7: np.dot(alpha, A.dot(bb)),
        8: np.dot(alpha, b1 * A.dot(b1) + b2 * A.dot(b2)),
        9: np.dot(alpha, A.dot(b1)),
        10: np.dot(alpha, e * bb),
        11: np.dot(alpha, e * b1),
        12: np.dot(alpha, bb * bb),
        13: np.dot(alpha, b1 * bb),
        14: np.dot(alpha, b1 * b1),
        15: np.dot(alpha, b2) ** 2,
    }
    return {k: _residual(v, STOCHASTIC_RHS[k]) for k, v in lhs.items()}


def deterministic_residuals(t: SrkTableau):
    """Residuals of the classical order conditions through order 4."""
    alpha, A, c = t.alpha, t.A, t.c
    one = alpha * 0 + 1
    lhs = {
        "D1": np.dot(alpha, one),
        "D2": np.dot(alpha, c),
        "D3": np.dot(alpha, c * c),
        "D4": np.dot(alpha, A.dot(c)),
        "D5": np.dot(alpha, c * c * c),
        "D6": np.dot(alpha, c * A.dot(c)),
        "D7": np.dot(alpha, A.dot(c * c)),
        "D8": np.dot(alpha, A.dot(A.dot(c))),
    }
    return {k: _residual(v, DETERMINISTIC_RHS[k]) for k, v in lhs.items()}


def _residual(lhs, rhs):
    res = lhs - rhs
    return res if isinstance(res, (Fraction, int)) else float(res)


@dataclass(frozen=True)
class OrderReport:
    """Order classification of one tableau at a given tolerance.

    ``residuals`` maps the stochastic condition numbers 1-15 and the
    deterministic identifiers D1-D8 to their residual values.
    """

    stochastic_order: int
    deterministic_order: int
    residuals: dict
    tolerance: float


def _classify(residuals, requirements, tol):
    order = 0
    for p in sorted(requirements):
        if all(abs(residuals[k]) <= tol for k in requirements[p]):
            order = p
        else:
            break
    return order


def check_stochastic_order(t: SrkTableau, tol: float = DEFAULT_ORDER_TOL) -> OrderReport:
    """Evaluate every order condition and classify the tableau.

    The stochastic order is the largest p in {1, 2, 3} whose full condition
    set holds within ``tol`` (0 if even the consistency condition fails).
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    sto = stochastic_residuals(t)
    det = deterministic_residuals(t)
    report = OrderReport(
        stochastic_order=_classify(sto, STOCHASTIC_ORDER_CONDITIONS, tol),
        deterministic_order=_classify(det, DETERMINISTIC_ORDER_CONDITIONS, tol),
        residuals={**sto, **det},
        tolerance=tol,
    )
    return report


def check_deterministic_order(t: SrkTableau, tol: float = DEFAULT_ORDER_TOL) -> int:
    """Highest classical order (0 to 4) satisfied within ``tol``."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return _classify(deterministic_residuals(t), DETERMINISTIC_ORDER_CONDITIONS, tol)


class TableauParseError(ValueError):
    """Raised for malformed coefficient documents; messages carry line numbers."""


_KEY_RE = re.compile(r"^\s*(\w+)\s*=\s*(.*?)\s*$")


def _parse_number(token, lineno):
    try:
        if "/" in token:
            num, den = token.split("/")
            return float(Fraction(int(num), int(den)))
        return float(token)
    except (ValueError, ZeroDivisionError):
        raise TableauParseError(f"line {lineno}: invalid number {token!r}") from None


def _parse_row(text, lineno):
    tokens = [tok for tok in re.split(r"[,\s]+", text.strip()) if tok]
    return [_parse_number(tok, lineno) for tok in tokens]


def load_tableau(text: str) -> SrkTableau:
    """Parse a plain-text coefficient document.

    Format: ``key = value`` lines for ``s``, ``alpha``, ``b1``, ``b2`` and
    optionally ``c`` and ``name`` (vectors comma or whitespace separated),
    plus a line ``A =`` followed by the s matrix rows.  Entries are decimal
    literals at full double precision; simple fractions like ``3/8`` are
    also accepted.  Lines starting with ``#`` are comments.
    """
    fields = {}
    a_rows = []
    a_lineno = None
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        raw = lines[i]
        i += 1
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _KEY_RE.match(line)
        if not m:
            raise TableauParseError(f"line {i}: expected 'key = value', got {raw!r}")
        key, value = m.group(1).lower(), m.group(2)
        if key == "a":
            a_lineno = i
            if value:
                raise TableauParseError(
                    f"line {i}: matrix rows must follow on their own lines")
            while i < len(lines):
                nxt = lines[i].split("#", 1)[0].strip()
                if not nxt:
                    i += 1
                    continue
                if _KEY_RE.match(nxt):
                    break
                i += 1
                a_rows.append(_parse_row(nxt, i))
        elif key == "name":
            fields["name"] = value
        elif key == "s":
            try:
                fields["s"] = int(value)
            except ValueError:
                raise TableauParseError(f"line {i}: invalid stage count {value!r}") from None
        elif key in ("alpha", "b1", "b2", "c"):
            fields[key] = _parse_row(value, i)
        else:
            raise TableauParseError(f"line {i}: unknown key {key!r}")

    for required in ("s", "alpha", "b1", "b2"):
        if required not in fields:
            raise TableauParseError(f"missing required key {required!r}")
    s = fields["s"]
    if len(a_rows) != s:
        where = f"line {a_lineno}: " if a_lineno else ""
        raise TableauParseError(f"{where}expected {s} rows for A, got {len(a_rows)}")
    for k, row in enumerate(a_rows):
        if len(row) != s:
            raise TableauParseError(f"A row {k + 1} has {len(row)} entries, expected {s}")
    for key in ("alpha", "b1", "b2", "c"):
        if key in fields and len(fields[key]) != s:
            raise TableauParseError(
                f"{key} has {len(fields[key])} entries, expected {s}")
    try:
        return SrkTableau(
            name=fields.get("name", "custom"),
            alpha=fields["alpha"],
            A=a_rows,
            b1=fields["b1"],
            b2=fields["b2"],
            c=fields.get("c"),
        )
    except ValueError as exc:
        raise TableauParseError(str(exc)) from None
