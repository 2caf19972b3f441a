"""Formula AST for linear integer arithmetic with a counting quantifier.

Terms are integer-linear expressions; atoms compare two terms or constrain a
term to a residue class.  On top of the usual first-order connectives and
quantifiers the AST has one extra binder, :class:`CountEq`, written
``C x = y . body``: it holds when the number of values of ``x`` satisfying
``body`` equals the value of ``y``.

Evaluation is deliberately a bounded brute force: ordinary quantifiers range
over a finite window and the counting quantifier is answered by
:func:`count_witnesses`, which enumerates the window and reports a stability
flag when witnesses crowd the window edges.  That makes the evaluator an
independent desk-scale oracle for the elimination engine rather than a
decision procedure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .errors import ParameterError, UnboundVariableError


class Term:
    """Integer-linear expression: a constant plus variables with coefficients.

    Immutable by convention; zero coefficients are never stored.
    """

    __slots__ = ("constant", "coeffs")

    def __init__(self, constant: int = 0, coeffs: Optional[Mapping[str, int]] = None):
        self.constant = int(constant)
        clean = {}
        if coeffs:
            for name, c in coeffs.items():
                if not name:
                    raise ParameterError("empty variable name in term")
                if c:
                    clean[name] = int(c)
        self.coeffs = clean

    def __eq__(self, other):
        return (
            isinstance(other, Term)
            and self.constant == other.constant
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.constant, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        return f"Term({self.constant!r}, {self.coeffs!r})"

    def __add__(self, other: Union["Term", int]) -> "Term":
        if isinstance(other, int):
            return Term(self.constant + other, self.coeffs)
        merged = dict(self.coeffs)
        for name, c in other.coeffs.items():
            merged[name] = merged.get(name, 0) + c
        return Term(self.constant + other.constant, merged)

    __radd__ = __add__

    def __neg__(self) -> "Term":
        return Term(-self.constant, {n: -c for n, c in self.coeffs.items()})

    def __sub__(self, other: Union["Term", int]) -> "Term":
        return self + (-other if isinstance(other, Term) else -other)

    def __mul__(self, scalar: int) -> "Term":
        if scalar == 0:
            return Term(0)
        return Term(self.constant * scalar, {n: c * scalar for n, c in self.coeffs.items()})

    __rmul__ = __mul__

    def variables(self) -> set:
        return set(self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        total = self.constant
        for name, c in self.coeffs.items():
            try:
                total += c * assignment[name]
            except KeyError:
                raise UnboundVariableError(f"no value for variable {name!r}") from None
        return total

    def positive_part(self) -> "Term":
        """The term collecting the positive coefficients and constant."""
        return Term(
            self.constant if self.constant > 0 else 0,
            {n: c for n, c in self.coeffs.items() if c > 0},
        )

    def negative_part(self) -> "Term":
        """The negated negative half, so ``self == positive_part() - negative_part()``."""
        return Term(
            -self.constant if self.constant < 0 else 0,
            {n: -c for n, c in self.coeffs.items() if c < 0},
        )


def variable(name: str) -> Term:
    return Term(0, {name: 1})


def constant(value: int) -> Term:
    return Term(value)


def _as_term(value: Union[Term, int, str]) -> Term:
    if isinstance(value, Term):
        return value
    if isinstance(value, str):
        return variable(value)
    return constant(value)


class Formula:
    """Base class for all formula nodes.  Instances are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    def __repr__(self):
        return "TRUE"


@dataclass(frozen=True)
class FalseF(Formula):
    def __repr__(self):
        return "FALSE"


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True, eq=False)
class _Comparison(Formula):
    lhs: Term
    rhs: Term

    def __post_init__(self):
        object.__setattr__(self, "lhs", _as_term(self.lhs))
        object.__setattr__(self, "rhs", _as_term(self.rhs))

    def __eq__(self, other):
        return type(self) is type(other) and self.lhs == other.lhs and self.rhs == other.rhs

    def __hash__(self):
        return hash((type(self).__name__, self.lhs, self.rhs))


class Le(_Comparison):
    """lhs <= rhs"""


class Lt(_Comparison):
    """lhs < rhs"""


class Eq(_Comparison):
    """lhs = rhs"""


@dataclass(frozen=True, eq=False)
class Cong(Formula):
    """term = residue (mod modulus); the residue is stored canonically."""

    term: Term
    residue: int
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "term", _as_term(self.term))
        if self.modulus < 1:
            raise ParameterError(f"congruence modulus must be positive, got {self.modulus}")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def __eq__(self, other):
        return (
            isinstance(other, Cong)
            and self.term == other.term
            and self.residue == other.residue
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.term, self.residue, self.modulus))


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, eq=False)
class _NaryConnective(Formula):
    parts: tuple

    def __post_init__(self):
        flat = []
        for part in self.parts:
            if type(part) is type(self):
                flat.extend(part.parts)
            else:
                flat.append(part)
        if len(flat) < 2:
            raise ParameterError(f"{type(self).__name__} needs at least two parts")
        object.__setattr__(self, "parts", tuple(flat))

    def __eq__(self, other):
        return type(self) is type(other) and self.parts == other.parts

    def __hash__(self):
        return hash((type(self).__name__, self.parts))


class And(_NaryConnective):
    """n-ary conjunction; nested conjunctions are flattened at construction."""


class Or(_NaryConnective):
    """n-ary disjunction; nested disjunctions are flattened at construction."""


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class CountEq(Formula):
    """Counting quantifier: the number of counted_var values satisfying the
    body equals the value of count_var (which is free in the construct)."""

    counted_var: str
    count_var: str
    body: Formula


@dataclass(frozen=True)
class CountResult:
    """Outcome of a bounded witness count.

    When ``stable`` is false the enumeration window may truncate the witness
    set and ``count`` is only a lower bound.
    """

    count: int
    stable: bool


def conj(parts: Iterable[Formula]) -> Formula:
    parts = [p for p in parts if not isinstance(p, TrueF)]
    if any(isinstance(p, FalseF) for p in parts):
        return FALSE
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def disj(parts: Iterable[Formula]) -> Formula:
    parts = [p for p in parts if not isinstance(p, FalseF)]
    if any(isinstance(p, TrueF) for p in parts):
        return TRUE
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(tuple(parts))


def negate(f: Formula) -> Formula:
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, Not):
        return f.body
    return Not(f)


def implies(antecedent: Formula, consequent: Formula) -> Formula:
    """Implication is sugar for ``!a | b`` and is normalised immediately."""
    return disj([negate(antecedent), consequent])


def iff(left: Formula, right: Formula) -> Formula:
    return conj([implies(left, right), implies(right, left)])


def free_vars(f: Formula) -> set:
    if isinstance(f, (TrueF, FalseF)):
        return set()
    if isinstance(f, _Comparison):
        return f.lhs.variables() | f.rhs.variables()
    if isinstance(f, Cong):
        return f.term.variables()
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, _NaryConnective):
        out = set()
        for part in f.parts:
            out |= free_vars(part)
        return out
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, CountEq):
        return (free_vars(f.body) - {f.counted_var}) | {f.count_var}
    raise TypeError(f"not a formula: {f!r}")


def all_variable_names(f: Formula) -> set:
    """Every variable name occurring in the formula, bound or free."""
    if isinstance(f, (TrueF, FalseF)):
        return set()
    if isinstance(f, _Comparison):
        return f.lhs.variables() | f.rhs.variables()
    if isinstance(f, Cong):
        return f.term.variables()
    if isinstance(f, Not):
        return all_variable_names(f.body)
    if isinstance(f, _NaryConnective):
        out = set()
        for part in f.parts:
            out |= all_variable_names(part)
        return out
    if isinstance(f, (Exists, Forall)):
        return all_variable_names(f.body) | {f.var}
    if isinstance(f, CountEq):
        return all_variable_names(f.body) | {f.counted_var, f.count_var}
    raise TypeError(f"not a formula: {f!r}")


class FreshNames:
    """Deterministic fresh-name supply: one monotone counter, a reserved
    leading underscore, and a short kind tag (``_u3``, ``_y7``, ...)."""

    def __init__(self, reserved: Iterable[str] = ()):
        self._used = set(reserved)
        self._counter = 0

    def reserve(self, names: Iterable[str]) -> None:
        self._used.update(names)

    def fresh(self, kind: str = "q") -> str:
        while True:
            name = f"_{kind}{self._counter}"
            self._counter += 1
            if name not in self._used:
                self._used.add(name)
                return name


def _substitute_term(t: Term, var: str, replacement: Term) -> Term:
    if var not in t.coeffs:
        return t
    c = t.coeffs[var]
    rest = Term(t.constant, {n: v for n, v in t.coeffs.items() if n != var})
    return rest + c * replacement


def substitute(f: Formula, var: str, replacement: Union[Term, int, str]) -> Formula:
    """Replace free occurrences of ``var`` by a term, avoiding capture.

    Binders whose variable occurs free in the replacement are renamed to a
    fresh name first.  Substituting for a counting quantifier's count
    variable requires the replacement to be a plain variable.
    """
    replacement = _as_term(replacement)
    fresh = FreshNames(all_variable_names(f) | replacement.variables() | {var})

    def walk(g: Formula) -> Formula:
        if isinstance(g, (TrueF, FalseF)):
            return g
        if isinstance(g, _Comparison):
            return type(g)(
                _substitute_term(g.lhs, var, replacement),
                _substitute_term(g.rhs, var, replacement),
            )
        if isinstance(g, Cong):
            return Cong(_substitute_term(g.term, var, replacement), g.residue, g.modulus)
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, _NaryConnective):
            return type(g)(tuple(walk(p) for p in g.parts))
        if isinstance(g, (Exists, Forall)):
            if g.var == var:
                return g
            if g.var in replacement.coeffs:
                renamed = fresh.fresh()
                body = substitute(g.body, g.var, variable(renamed))
                return type(g)(renamed, walk(body))
            return type(g)(g.var, walk(g.body))
        if isinstance(g, CountEq):
            counted, body = g.counted_var, g.body
            if counted != var and counted in replacement.coeffs and var in free_vars(body):
                renamed = fresh.fresh()
                body = substitute(body, counted, variable(renamed))
                counted = renamed
            count_var = g.count_var
            if count_var == var:
                if not (
                    replacement.constant == 0
                    and len(replacement.coeffs) == 1
                    and next(iter(replacement.coeffs.values())) == 1
                ):
                    raise ParameterError(
                        "count variable can only be replaced by a variable"
                    )
                count_var = next(iter(replacement.coeffs))
            new_body = body if counted == var else walk(body)
            return CountEq(counted, count_var, new_body)
        raise TypeError(f"not a formula: {g!r}")

    return walk(f)


# --- bounded evaluation -----------------------------------------------------

# Domain tags live in the sets module conceptually, but evaluation only needs
# to know whether values start at zero; accept the tag duck-typed by name.


def _domain_is_nat(domain) -> bool:
    name = getattr(domain, "name", None) or str(domain)
    if name in ("N", "DomainTag.N"):
        return True
    if name in ("Z", "DomainTag.Z"):
        return False
    raise ParameterError(f"unknown domain {domain!r}")


def _quantifier_range(domain, bound: int) -> range:
    if bound < 1:
        raise ParameterError("quantifier bound must be positive")
    lo = 0 if _domain_is_nat(domain) else -bound
    return range(lo, bound + 1)


def evaluate(
    f: Formula,
    assignment: Mapping[str, int],
    domain="Z",
    quant_bound: int = 64,
    margin: Optional[int] = None,
) -> bool:
    """Truth value under bounded quantifier semantics.

    ``Exists``/``Forall`` range over ``[-quant_bound, quant_bound]`` (or
    ``[0, quant_bound]`` over the naturals); a counting quantifier holds when
    the bounded witness count over that window is stable and equals the
    value of the count variable.  This approximates the unbounded semantics;
    callers choose bounds large enough for their formulas.
    """
    env = dict(assignment)
    missing = free_vars(f) - set(env)
    if missing:
        raise UnboundVariableError(f"no value for variable(s) {sorted(missing)}")
    return _eval(f, env, domain, quant_bound, margin)


def _eval(f, env, domain, bound, margin) -> bool:
    tf = type(f)
    if tf is Le:
        return f.lhs.evaluate(env) <= f.rhs.evaluate(env)
    if tf is Lt:
        return f.lhs.evaluate(env) < f.rhs.evaluate(env)
    if tf is Eq:
        return f.lhs.evaluate(env) == f.rhs.evaluate(env)
    if tf is Cong:
        return f.term.evaluate(env) % f.modulus == f.residue
    if tf is And:
        return all(_eval(p, env, domain, bound, margin) for p in f.parts)
    if tf is Or:
        return any(_eval(p, env, domain, bound, margin) for p in f.parts)
    if tf is Not:
        return not _eval(f.body, env, domain, bound, margin)
    if tf is TrueF:
        return True
    if tf is FalseF:
        return False
    if tf is Exists or tf is Forall:
        var = f.var
        saved = env.get(var)
        had = var in env
        hit = tf is Forall
        for value in _quantifier_range(domain, bound):
            env[var] = value
            result = _eval(f.body, env, domain, bound, margin)
            if result != (tf is Forall):
                hit = result
                break
        if had:
            env[var] = saved
        else:
            env.pop(var, None)
        return hit
    if tf is CountEq:
        target = env[f.count_var]
        window = (0 if _domain_is_nat(domain) else -bound, bound)
        result = _count(f.body, f.counted_var, env, domain, window, margin, bound)
        return result.stable and result.count == target
    raise TypeError(f"not a formula: {f!r}")


def max_abs_coefficient(f: Formula) -> int:
    """Largest absolute coefficient appearing in any atom of the formula."""
    if isinstance(f, _Comparison):
        values = list(f.lhs.coeffs.values()) + list(f.rhs.coeffs.values())
    elif isinstance(f, Cong):
        values = list(f.term.coeffs.values())
    elif isinstance(f, Not):
        return max_abs_coefficient(f.body)
    elif isinstance(f, _NaryConnective):
        return max((max_abs_coefficient(p) for p in f.parts), default=0)
    elif isinstance(f, (Exists, Forall)):
        return max_abs_coefficient(f.body)
    elif isinstance(f, CountEq):
        return max_abs_coefficient(f.body)
    else:
        values = []
    return max((abs(v) for v in values), default=0)


def default_margin(body: Formula) -> int:
    """Stability margin heuristic: twice the largest coefficient plus one."""
    return 2 * (max_abs_coefficient(body) + 1)


def count_witnesses(
    body: Formula,
    counted_var: str,
    assignment: Mapping[str, int],
    domain="Z",
    window: tuple[int, int] = (-64, 64),
    margin: Optional[int] = None,
    quant_bound: int = 64,
) -> CountResult:
    """Brute-force witness count for ``counted_var`` over a window.

    The count is the number of window values making the body true; the result
    is flagged unstable when some witness lies within ``margin`` of a
    truncating window edge.  Over the naturals the window is clamped at zero
    and a lower edge at zero is not truncating (the domain really ends
    there), so witnesses at small naturals do not by themselves make the
    count unstable.
    """
    env = dict(assignment)
    missing = free_vars(body) - set(env) - {counted_var}
    if missing:
        raise UnboundVariableError(f"no value for variable(s) {sorted(missing)}")
    if margin is None:
        margin = default_margin(body)
    if margin < 1:
        raise ParameterError("margin must be positive")
    return _count(body, counted_var, env, domain, window, margin, quant_bound)


def _count(body, counted_var, env, domain, window, margin, bound) -> CountResult:
    lo, hi = window
    lower_truncates = True
    if _domain_is_nat(domain):
        if lo <= 0:
            lo = 0
            lower_truncates = False
    if margin is None:
        margin = default_margin(body)
    saved = env.get(counted_var)
    had = counted_var in env
    count = 0
    stable = True
    for value in range(lo, hi + 1):
        env[counted_var] = value
        if _eval(body, env, domain, bound, margin):
            count += 1
            if hi - value < margin or (lower_truncates and value - lo < margin):
                stable = False
    if had:
        env[counted_var] = saved
    else:
        env.pop(counted_var, None)
    return CountResult(count=count, stable=stable)


# --- partial evaluation -----------------------------------------------------


def simplify(f: Formula, assignment: Mapping[str, int]) -> Formula:
    """Fold a partial assignment into the formula.

    Variables present in the assignment are replaced by their values; atoms
    that become ground are decided, and connectives collapse accordingly.
    Bound variables shadow the assignment, mirroring :func:`evaluate`.  The
    result is logically equivalent to the original under any extension of
    the assignment (bounded semantics included, since no quantifier
    structure is touched).
    """

    def fold_term(t: Term, shadowed: frozenset) -> Term:
        if not t.coeffs:
            return t
        const = t.constant
        coeffs = {}
        for name, c in t.coeffs.items():
            if name in assignment and name not in shadowed:
                const += c * assignment[name]
            else:
                coeffs[name] = c
        return Term(const, coeffs)

    def walk(g: Formula, shadowed: frozenset) -> Formula:
        tg = type(g)
        if tg in (TrueF, FalseF):
            return g
        if tg in (Le, Lt, Eq):
            lhs, rhs = fold_term(g.lhs, shadowed), fold_term(g.rhs, shadowed)
            if lhs.is_constant() and rhs.is_constant():
                a, b = lhs.constant, rhs.constant
                verdict = a <= b if tg is Le else a < b if tg is Lt else a == b
                return TRUE if verdict else FALSE
            return tg(lhs, rhs)
        if tg is Cong:
            t = fold_term(g.term, shadowed)
            if t.is_constant():
                return TRUE if t.constant % g.modulus == g.residue else FALSE
            return Cong(t, g.residue, g.modulus)
        if tg is Not:
            return negate(walk(g.body, shadowed))
        if tg is And:
            return conj([walk(p, shadowed) for p in g.parts])
        if tg is Or:
            return disj([walk(p, shadowed) for p in g.parts])
        if tg in (Exists, Forall):
            body = walk(g.body, shadowed | {g.var})
            if isinstance(body, (TrueF, FalseF)):
                return body
            return tg(g.var, body)
        if tg is CountEq:
            return CountEq(
                g.counted_var, g.count_var, walk(g.body, shadowed | {g.counted_var})
            )
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, frozenset())


def node_count(f: Formula) -> int:
    """Size measure: formula nodes plus one per term coefficient."""
    if isinstance(f, (TrueF, FalseF)):
        return 1
    if isinstance(f, _Comparison):
        return 1 + len(f.lhs.coeffs) + len(f.rhs.coeffs)
    if isinstance(f, Cong):
        return 1 + len(f.term.coeffs)
    if isinstance(f, Not):
        return 1 + node_count(f.body)
    if isinstance(f, _NaryConnective):
        return 1 + sum(node_count(p) for p in f.parts)
    if isinstance(f, (Exists, Forall)):
        return 1 + node_count(f.body)
    if isinstance(f, CountEq):
        return 1 + node_count(f.body)
    raise TypeError(f"not a formula: {f!r}")


def contains_counting(f: Formula) -> bool:
    """Structural scan for any counting-quantifier node."""
    if isinstance(f, CountEq):
        return True
    if isinstance(f, Not):
        return contains_counting(f.body)
    if isinstance(f, _NaryConnective):
        return any(contains_counting(p) for p in f.parts)
    if isinstance(f, (Exists, Forall)):
        return contains_counting(f.body)
    return False
