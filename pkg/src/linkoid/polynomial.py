"""Exact sparse polynomials used for every invariant value.

Three exact families share one implementation:

* :class:`LaurentPoly` is a Laurent polynomial in one variable (``A`` by
  default) with rational coefficients.
* :class:`AffinePoly` is a Laurent polynomial in ``t``; it is the value type of
  the affine index polynomial.
* :class:`ArrowPoly` is a polynomial in ``A`` (Laurent) and the commuting
  variables ``K1, K2, ...`` (non-negative powers).

:class:`RealPoly` carries floating point coefficients together with a standard
error per coefficient, as produced by Monte Carlo averages.

Canonical printing sorts terms by the exponent of the main variable in
descending order, then by the K-monomial in ascending order, and prints
rational coefficients as ``p/q``::

    >>> A = LaurentPoly.variable()
    >>> str(A + A**-1 * ArrowPoly.k(1))
    'A + A^-1*K1'
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Iterable, Mapping, Union

from .errors import EmptyList

__all__ = [
    "LaurentPoly",
    "AffinePoly",
    "ArrowPoly",
    "RealPoly",
    "KMonomial",
    "ArrowMonomial",
    "substitute",
    "mean",
    "real_mean",
    "as_terms",
    "loop_value",
]

Number = Union[int, Fraction]
KMonomial = tuple[tuple[int, int], ...]
"""Sorted ``((index, power), ...)`` with every power positive."""
ArrowMonomial = tuple[int, KMonomial]
"""``(A exponent, K monomial)``."""


def _frac(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not polynomial coefficients")
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


def _k_mul(a: KMonomial, b: KMonomial) -> KMonomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for index, power in b:
        merged[index] = merged.get(index, 0) + power
    return tuple(sorted(merged.items()))


def _power_str(var: str, exp: int) -> str:
    return var if exp == 1 else f"{var}^{exp}"


def _k_str(ks: KMonomial) -> str:
    return "*".join(_power_str(f"K{i}", p) for i, p in ks)


def _join_terms(pieces: list[tuple[Fraction | float, str]], coef_fmt) -> str:
    """Join ``(coefficient, monomial string)`` pairs into canonical text."""
    if not pieces:
        return "0"
    out: list[str] = []
    for position, (coef, mono) in enumerate(pieces):
        negative = coef < 0
        magnitude = -coef if negative else coef
        if not mono:
            body = coef_fmt(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{coef_fmt(magnitude)}*{mono}"
        if position == 0:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


class _Sparse:
    """Shared immutable sparse-dictionary machinery."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Any, Any] | None = None):
        clean: dict[Any, Fraction] = {}
        if terms:
            for key, coef in terms.items():
                c = _frac(coef)
                if c:
                    clean[key] = c
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[Any, Fraction], template: _Sparse) -> Any:
        obj = object.__new__(cls)
        obj._terms = {k: v for k, v in terms.items() if v}
        obj._hash = None
        obj._copy_meta(template)
        return obj

    def _copy_meta(self, other: _Sparse) -> None:
        pass

    @property
    def terms(self) -> dict[Any, Fraction]:
        """A copy of the monomial to coefficient map."""
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r})"


class LaurentPoly(_Sparse):
    """Laurent polynomial in a single variable with rational coefficients.

    Args:
        terms: Map from integer exponent to coefficient. Zero coefficients are
            dropped.
        var: Variable name used for printing. Polynomials in different
            variables do not mix.
    """

    __slots__ = ("var",)

    def __init__(self, terms: Mapping[int, Number] | None = None, var: str = "A"):
        for key in terms or {}:
            if not isinstance(key, int) or isinstance(key, bool):
                raise TypeError("Laurent exponents must be integers")
        super().__init__(terms)
        self.var = var

    def _copy_meta(self, other: _Sparse) -> None:
        self.var = other.var  # type: ignore[attr-defined]

    # construction helpers ---------------------------------------------------
    @classmethod
    def constant(cls, value: Number, var: str = "A") -> LaurentPoly:
        return cls({0: value}, var=var)

    @classmethod
    def monomial(cls, exp: int, coef: Number = 1, var: str = "A") -> LaurentPoly:
        return cls({exp: coef}, var=var)

    @classmethod
    def variable(cls, var: str = "A") -> LaurentPoly:
        return cls({1: 1}, var=var)

    # arithmetic ---------------------------------------------------------------
    def _coerce(self, other: Any) -> LaurentPoly | None:
        if isinstance(other, LaurentPoly):
            if other.var != self.var:
                raise TypeError(f"cannot combine polynomials in {self.var} and {other.var}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._raw({0: _frac(other)}, self)
        return None

    def __add__(self, other: Any) -> Any:
        if isinstance(other, ArrowPoly):
            return self.to_arrow() + other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for k, v in o._terms.items():
            out[k] = out.get(k, 0) + v
        return self._raw(out, self)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return self._raw({k: -v for k, v in self._terms.items()}, self)

    def __sub__(self, other: Any) -> Any:
        if isinstance(other, ArrowPoly):
            return self.to_arrow() - other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> Any:
        return (-self) + other

    def __mul__(self, other: Any) -> Any:
        if isinstance(other, ArrowPoly):
            return self.to_arrow() * other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for ka, va in self._terms.items():
            for kb, vb in o._terms.items():
                out[ka + kb] = out.get(ka + kb, 0) + va * vb
        return self._raw(out, self)

    __rmul__ = __mul__

    def scale(self, factor: Number) -> LaurentPoly:
        f = _frac(factor)
        return self._raw({k: v * f for k, v in self._terms.items()}, self)

    def __truediv__(self, other: Any) -> LaurentPoly:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(1 / _frac(other))
        return NotImplemented

    def __pow__(self, exponent: int) -> LaurentPoly:
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (k, v), = self._terms.items()
            return self._raw({k * exponent: v**exponent}, self)
        result = self._raw({0: Fraction(1)}, self)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # comparison -------------------------------------------------------------
    def __eq__(self, other: Any) -> bool:
        if isinstance(other, ArrowPoly):
            return other == self
        if isinstance(other, LaurentPoly):
            return self.var == other.var and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == ({0: _frac(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if not self._terms:
                self._hash = hash(0)
            elif set(self._terms) == {0}:
                self._hash = hash(self._terms[0])
            else:
                self._hash = hash((self.var, frozenset(self._terms.items())))
        return self._hash

    # queries ------------------------------------------------------------------
    def coefficient(self, exp: int) -> Fraction:
        return self._terms.get(exp, Fraction(0))

    def exponents(self) -> list[int]:
        return sorted(self._terms, reverse=True)

    def evaluate(self, x: Number | float) -> Fraction | float:
        """Evaluate at a nonzero number (exactly when ``x`` is rational)."""
        total: Fraction | float = 0
        for k, v in self._terms.items():
            total += v * (x**k if k >= 0 else 1 / x ** (-k))
        return total

    def to_arrow(self) -> ArrowPoly:
        """Embed into :class:`ArrowPoly` (no K variables)."""
        return ArrowPoly({(k, ()): v for k, v in self._terms.items()}, var=self.var)

    def __str__(self) -> str:
        pieces = [
            (self._terms[k], "" if k == 0 else _power_str(self.var, k))
            for k in sorted(self._terms, reverse=True)
        ]
        return _join_terms(pieces, str)


class AffinePoly(LaurentPoly):
    """Laurent polynomial in ``t`` with integer coefficients."""

    __slots__ = ()

    def __init__(self, terms: Mapping[int, int] | None = None, var: str = "t"):
        for coef in (terms or {}).values():
            if _frac(coef).denominator != 1:
                raise ValueError("affine index coefficients are integers")
        super().__init__(terms, var=var)

    def at_one(self) -> int:
        """Value at ``t = 1``."""
        return int(sum(self._terms.values(), Fraction(0)))


class ArrowPoly(_Sparse):
    """Polynomial in ``A^{±1}`` and ``K1, K2, ...`` with rational coefficients.

    Args:
        terms: Map from ``(a_exponent, k_monomial)`` to coefficient, where
            ``k_monomial`` is a tuple of ``(index, power)`` pairs.
        var: Name of the Laurent variable (``A``).
    """

    __slots__ = ("var",)

    def __init__(self, terms: Mapping[ArrowMonomial, Number] | None = None, var: str = "A"):
        normalized: dict[ArrowMonomial, Fraction] = {}
        for (a, ks), coef in (terms or {}).items():
            ks_clean = tuple(sorted((int(i), int(p)) for i, p in dict(ks).items() if p))
            if any(p < 0 or i < 1 for i, p in ks_clean):
                raise ValueError("K indices must be >= 1 with non-negative powers")
            key = (int(a), ks_clean)
            normalized[key] = normalized.get(key, Fraction(0)) + _frac(coef)
        super().__init__(normalized)
        self.var = var

    def _copy_meta(self, other: _Sparse) -> None:
        self.var = other.var  # type: ignore[attr-defined]

    @classmethod
    def k(cls, index: int, power: int = 1) -> ArrowPoly:
        """The monomial ``K_index^power``."""
        return cls({(0, ((index, power),)): 1})

    @classmethod
    def constant(cls, value: Number) -> ArrowPoly:
        return cls({(0, ()): value})

    def _coerce(self, other: Any) -> ArrowPoly | None:
        if isinstance(other, ArrowPoly):
            return other
        if isinstance(other, LaurentPoly):
            if other.var != self.var:
                raise TypeError(f"cannot combine polynomials in {self.var} and {other.var}")
            return other.to_arrow()
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._raw({(0, ()): _frac(other)}, self)
        return None

    def __add__(self, other: Any) -> ArrowPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for k, v in o._terms.items():
            out[k] = out.get(k, 0) + v
        return self._raw(out, self)

    __radd__ = __add__

    def __neg__(self) -> ArrowPoly:
        return self._raw({k: -v for k, v in self._terms.items()}, self)

    def __sub__(self, other: Any) -> ArrowPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> ArrowPoly:
        return (-self) + other

    def __mul__(self, other: Any) -> ArrowPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict[ArrowMonomial, Fraction] = {}
        for (a1, k1), v1 in self._terms.items():
            for (a2, k2), v2 in o._terms.items():
                key = (a1 + a2, _k_mul(k1, k2))
                out[key] = out.get(key, 0) + v1 * v2
        return self._raw(out, self)

    __rmul__ = __mul__

    def scale(self, factor: Number) -> ArrowPoly:
        f = _frac(factor)
        return self._raw({k: v * f for k, v in self._terms.items()}, self)

    def __truediv__(self, other: Any) -> ArrowPoly:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(1 / _frac(other))
        return NotImplemented

    def __pow__(self, exponent: int) -> ArrowPoly:
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have inverses")
            ((a, ks), v), = self._terms.items()
            if ks:
                raise ValueError("K variables have no inverses")
            return self._raw({(a * exponent, ()): v**exponent}, self)
        result = self._raw({(0, ()): Fraction(1)}, self)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, ArrowPoly):
            return self.var == other.var and self._terms == other._terms
        if isinstance(other, LaurentPoly):
            return self.var == other.var and self._terms == other.to_arrow()._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == ({(0, ()): _frac(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.has_k():
                self._hash = hash((self.var, frozenset(self._terms.items())))
            else:
                self._hash = hash(self.to_laurent())
        return self._hash

    def has_k(self) -> bool:
        """True when some term involves a K variable."""
        return any(ks for _, ks in self._terms)

    def k_degree(self) -> int:
        """Largest K index that occurs (0 when none)."""
        return max((i for _, ks in self._terms for i, _ in ks), default=0)

    def coefficient(self, a: int, ks: Mapping[int, int] | KMonomial = ()) -> Fraction:
        key = (a, tuple(sorted(dict(ks).items())))
        return self._terms.get(key, Fraction(0))

    def to_laurent(self) -> LaurentPoly:
        """Return the equal :class:`LaurentPoly`; fails if a K variable occurs."""
        if self.has_k():
            raise ValueError("polynomial involves K variables")
        return LaurentPoly({a: v for (a, _), v in self._terms.items()}, var=self.var)

    def specialize(self) -> LaurentPoly:
        """Substitute ``K_i = 1`` for every ``i``."""
        out: dict[int, Fraction] = {}
        for (a, _), v in self._terms.items():
            out[a] = out.get(a, 0) + v
        return LaurentPoly(out, var=self.var)

    def _sort_key(self, key: ArrowMonomial) -> tuple:
        a, ks = key
        return (-a, ks)

    def __str__(self) -> str:
        pieces = []
        for key in sorted(self._terms, key=self._sort_key):
            a, ks = key
            parts = []
            if a:
                parts.append(_power_str(self.var, a))
            if ks:
                parts.append(_k_str(ks))
            pieces.append((self._terms[key], "*".join(parts)))
        return _join_terms(pieces, str)


def _rule_index(key: Any) -> int | None:
    """Translate a substitution key to a K index; ``None`` means every K."""
    if isinstance(key, int) and not isinstance(key, bool):
        return key
    if isinstance(key, str):
        name = key.strip()
        if name in ("K", "K*", "Ki"):
            return None
        if name.startswith("K") and name[1:].isdigit():
            return int(name[1:])
    raise ValueError(f"unsupported substitution key {key!r}")


def substitute(
    p: ArrowPoly | LaurentPoly,
    rules: Mapping[Any, Number | LaurentPoly | ArrowPoly],
) -> ArrowPoly | LaurentPoly:
    """Substitute values for K variables.

    Args:
        p: Polynomial to rewrite.
        rules: Map from a K variable (``"K1"``, ``1``, or ``"K"`` for all of
            them) to a number or polynomial.

    Returns:
        A :class:`LaurentPoly` when no K variable survives, otherwise an
        :class:`ArrowPoly`.

    Example:
        >>> A = LaurentPoly.variable()
        >>> str(substitute(A + A**-1 * ArrowPoly.k(1), {"K1": 1}))
        'A + A^-1'
    """
    if isinstance(p, LaurentPoly):
        return p
    table: dict[int | None, Any] = {}
    for key, value in rules.items():
        table[_rule_index(key)] = value
    result: Any = ArrowPoly(var=p.var)
    for (a, ks), coef in p._terms.items():
        term: Any = ArrowPoly({(a, ()): coef}, var=p.var)
        for index, power in ks:
            value = table.get(index, table.get(None, ArrowPoly.k(index)))
            term = term * (value**power if not isinstance(value, (int, Fraction)) else _frac(value) ** power)
        result = result + term
    if isinstance(result, ArrowPoly) and not result.has_k():
        return result.to_laurent()
    return result


def loop_value(var: str = "A") -> LaurentPoly:
    """The loop value ``d = -A^2 - A^-2``."""
    return LaurentPoly({2: -1, -2: -1}, var=var)


# ---------------------------------------------------------------------------
# real-valued polynomials
# ---------------------------------------------------------------------------


def as_terms(value: Any) -> tuple[dict[ArrowMonomial, Fraction], str | None, bool]:
    """Return (terms, var, is_arrow) for any supported exact value."""
    if isinstance(value, ArrowPoly):
        return dict(value._terms), value.var, True
    if isinstance(value, LaurentPoly):
        return {(k, ()): v for k, v in value._terms.items()}, value.var, False
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return ({(0, ()): _frac(value)} if value else {}), None, False
    raise TypeError(f"unsupported value {value!r}")


class RealPoly:
    """Floating point polynomial with a standard error per coefficient.

    Monomials use the :class:`ArrowPoly` key shape so one type covers Laurent,
    arrow, affine and scalar averages. Scalars are stored as the constant term.

    Args:
        coefficients: Map from ``(exponent, k_monomial)`` to value.
        stderr: Map from monomial to standard error; missing entries mean 0.
        var: Name of the Laurent variable, or ``None`` for scalar values.
    """

    __slots__ = ("coefficients", "stderr", "var")

    def __init__(
        self,
        coefficients: Mapping[ArrowMonomial, float],
        stderr: Mapping[ArrowMonomial, float] | None = None,
        var: str | None = "A",
    ):
        self.coefficients = {k: float(v) for k, v in coefficients.items()}
        self.stderr = {k: float(v) for k, v in (stderr or {}).items()}
        if any(v < 0 or math.isnan(v) for v in self.stderr.values()):
            raise ValueError("standard errors must be non-negative")
        self.var = var

    @property
    def is_scalar(self) -> bool:
        return all(k == (0, ()) for k in self.coefficients)

    @property
    def scalar(self) -> float:
        """The constant coefficient (the value of a scalar average)."""
        return self.coefficients.get((0, ()), 0.0)

    def coefficient(self, a: int, ks: KMonomial = ()) -> float:
        return self.coefficients.get((a, ks), 0.0)

    def error(self, a: int, ks: KMonomial = ()) -> float:
        return self.stderr.get((a, ks), 0.0)

    def max_deviation(self, exact: Any) -> float:
        """Largest coefficient-wise absolute difference from an exact value."""
        terms, _, _ = as_terms(exact)
        keys = set(terms) | set(self.coefficients)
        return max((abs(self.coefficients.get(k, 0.0) - float(terms.get(k, 0))) for k in keys), default=0.0)

    def monomial_name(self, key: ArrowMonomial) -> str:
        a, ks = key
        parts = []
        if a:
            parts.append(_power_str(self.var or "A", a))
        if ks:
            parts.append(_k_str(ks))
        return "*".join(parts) or "1"

    def ordered_keys(self) -> list[ArrowMonomial]:
        keys = set(self.coefficients) | set(self.stderr)
        return sorted(keys, key=lambda k: (-k[0], k[1]))

    def __str__(self) -> str:
        pieces = []
        for key in self.ordered_keys():
            value = self.coefficients.get(key, 0.0)
            if value == 0.0:
                continue
            mono = "" if key == (0, ()) else self.monomial_name(key)
            pieces.append((value, mono))
        return _join_terms(pieces, lambda x: format(x, ".12g"))

    def __repr__(self) -> str:
        return f"RealPoly({str(self)!r})"

    def to_json(self) -> dict[str, Any]:
        keys = self.ordered_keys()
        return {
            "value": str(self),
            "coefficients": {self.monomial_name(k): self.coefficients.get(k, 0.0) for k in keys},
            "stderr": {self.monomial_name(k): self.stderr.get(k, 0.0) for k in keys},
        }


def mean(values: Iterable[Any], exact: bool = True) -> Any:
    """Coefficient-wise mean of exact values.

    Args:
        values: Numbers, :class:`LaurentPoly` or :class:`ArrowPoly` values.
        exact: Rational mean when true. Otherwise return a :class:`RealPoly`
            whose stderr is the sample standard deviation over ``sqrt(N)``.

    Raises:
        EmptyList: If ``values`` is empty.
    """
    items = list(values)
    if not items:
        raise EmptyList("mean of an empty list")
    n = len(items)
    if exact:
        if all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in items):
            return sum((_frac(v) for v in items), Fraction(0)) / n
        total: Any = 0
        for v in items:
            total = v + total if not isinstance(v, (int, Fraction)) else total + v
        if isinstance(total, (int, Fraction)):
            return _frac(total) / n
        return total.scale(Fraction(1, n))
    return real_mean([as_terms(v) for v in items])


def real_mean(samples: list[tuple[dict[ArrowMonomial, Any], str | None, bool]]) -> RealPoly:
    """Mean and standard error of per-sample coefficient maps.

    Coefficients absent from a sample count as zero.
    """
    if not samples:
        raise EmptyList("mean of an empty list")
    n = len(samples)
    keys: set[ArrowMonomial] = set()
    var: str | None = None
    for terms, v, _ in samples:
        keys.update(terms)
        var = var or v
    means: dict[ArrowMonomial, float] = {}
    errors: dict[ArrowMonomial, float] = {}
    for key in keys:
        column = [float(terms.get(key, 0)) for terms, _, _ in samples]
        mu = math.fsum(column) / n
        if n > 1:
            var_hat = math.fsum((x - mu) ** 2 for x in column) / (n - 1)
            se = math.sqrt(var_hat / n)
        else:
            se = 0.0
        means[key] = mu
        errors[key] = se
    return RealPoly(means, errors, var=var if var is not None else None)
