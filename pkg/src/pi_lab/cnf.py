"""CNF formulas, restrictions, and the implicant predicates.

Literals are DIMACS-style signed integers: variable ``v`` appears positively
as ``v`` and negated as ``-v``.  A clause is a tuple of distinct literals in
canonical order; a formula is an immutable sequence of clauses over variables
``1..num_vars``.  A restriction maps every variable to 0, 1, or free, and its
canonical text form is a string over ``{0, 1, *}`` (position ``i`` holds the
value of variable ``i + 1``).
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

Literal = int
Clause = tuple[Literal, ...]


class DimacsError(ValueError):
    """Malformed DIMACS input; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class Unsatisfiable(Exception):
    """Raised when simplification derives an empty clause."""


def complement(lit: Literal) -> Literal:
    return -lit


def variable_of(lit: Literal) -> int:
    return abs(lit)


def is_negated(lit: Literal) -> bool:
    return lit < 0


def _lit_key(lit: Literal) -> tuple[int, bool]:
    # canonical order: x1 < ~x1 < x2 < ~x2 < ...
    return (abs(lit), lit < 0)


def make_clause(literals: Iterable[Literal]) -> Clause:
    """Canonical clause: duplicates collapsed, literals sorted."""
    lits = set(literals)
    if 0 in lits:
        raise ValueError("0 is not a literal")
    return tuple(sorted(lits, key=_lit_key))


def is_tautological(clause: Clause) -> bool:
    """True when the clause contains some literal together with its complement."""
    return any(-lit in clause for lit in clause) if clause else False


@dataclass(frozen=True)
class CnfFormula:
    """Immutable CNF over variables 1..num_vars.

    Duplicate clauses are retained (they do not change semantics); duplicate
    literals inside a clause collapse at construction.  Tautological clauses
    are kept here and removed by :func:`preprocess`.
    """

    num_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        for clause in self.clauses:
            if clause != make_clause(clause):
                raise ValueError(f"clause {clause!r} is not in canonical form")
            for lit in clause:
                if not 1 <= abs(lit) <= self.num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")

    @classmethod
    def from_clauses(
        cls,
        num_vars: int,
        clauses: Iterable[Iterable[Literal]],
        declared_width: int | None = None,
    ) -> "CnfFormula":
        formula = cls(num_vars, tuple(make_clause(c) for c in clauses))
        if declared_width is not None and formula.width > declared_width:
            raise ValueError(
                f"width {formula.width} exceeds declared width {declared_width}"
            )
        return formula

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def variables_in_clauses(self) -> frozenset[int]:
        return frozenset(abs(lit) for clause in self.clauses for lit in clause)


@dataclass(frozen=True)
class Restriction:
    """Total map from variables to {0, 1, free}; ``values[i]`` is variable i+1.

    Free variables are stored as ``None``.  Canonical text uses ``*`` for free.
    """

    values: tuple[int | None, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("restriction needs at least one variable")
        for v in self.values:
            if v not in (0, 1, None):
                raise ValueError(f"restriction value {v!r} not in {{0, 1, *}}")

    @classmethod
    def all_free(cls, num_vars: int) -> "Restriction":
        return cls((None,) * num_vars)

    @classmethod
    def fixing(cls, num_vars: int, fixed: Mapping[int, int]) -> "Restriction":
        values: list[int | None] = [None] * num_vars
        for var, val in fixed.items():
            if not 1 <= var <= num_vars:
                raise ValueError(f"variable {var} out of range 1..{num_vars}")
            values[var - 1] = val
        return cls(tuple(values))

    @classmethod
    def from_assignment(cls, assignment: Sequence[int]) -> "Restriction":
        return cls(tuple(int(v) for v in assignment))

    @classmethod
    def from_text(cls, text: str) -> "Restriction":
        table = {"0": 0, "1": 1, "*": None}
        try:
            return cls(tuple(table[ch] for ch in text))
        except KeyError as exc:
            raise ValueError(f"bad restriction character {exc.args[0]!r}") from None

    @property
    def num_vars(self) -> int:
        return len(self.values)

    @property
    def text(self) -> str:
        return "".join("*" if v is None else str(v) for v in self.values)

    def __str__(self) -> str:
        return self.text

    def __lt__(self, other: "Restriction") -> bool:
        return self.text < other.text

    def value(self, var: int) -> int | None:
        return self.values[var - 1]

    @property
    def fixed_count(self) -> int:
        return sum(1 for v in self.values if v is not None)

    @property
    def free_count(self) -> int:
        return sum(1 for v in self.values if v is None)

    def fixed_items(self) -> list[tuple[int, int]]:
        return [(i + 1, v) for i, v in enumerate(self.values) if v is not None]

    def fixed_mapping(self) -> dict[int, int]:
        return dict(self.fixed_items())

    def free_vars(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, v in enumerate(self.values) if v is None)

    def true_literals(self) -> frozenset[Literal]:
        return frozenset(
            (i + 1) if v == 1 else -(i + 1)
            for i, v in enumerate(self.values)
            if v is not None
        )

    def unfix(self, var: int) -> "Restriction":
        values = list(self.values)
        values[var - 1] = None
        return Restriction(tuple(values))

    def extends(self, other: "Restriction") -> bool:
        """True when self fixes a superset of other's variables, agreeing on overlap."""
        if self.num_vars != other.num_vars:
            return False
        return all(
            o is None or o == s for s, o in zip(self.values, other.values)
        )

    def to_json_obj(self) -> dict:
        return {
            "n": self.num_vars,
            "fixed": {str(var): val for var, val in self.fixed_items()},
            "free": list(self.free_vars()),
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Restriction":
        fixed = {int(var): int(val) for var, val in obj["fixed"].items()}
        return cls.fixing(int(obj["n"]), fixed)


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF: comments ``c ...``, header ``p cnf n m``, 0-terminated clauses.

    Duplicate literals inside a clause collapse; tautological clauses are
    retained.  Raises :class:`DimacsError` with a line number on malformed
    headers, out-of-range literals, non-integer tokens, and clause-count
    mismatches.
    """
    num_vars: int | None = None
    num_clauses = 0
    clauses: list[Clause] = []
    pending: list[Literal] = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError(lineno, "duplicate 'p cnf' header")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(lineno, f"malformed header {line!r}")
            try:
                num_vars = int(parts[2])
                num_clauses = int(parts[3])
            except ValueError:
                raise DimacsError(lineno, f"non-integer header fields in {line!r}")
            if num_vars < 1:
                raise DimacsError(lineno, "variable count must be >= 1")
            if num_clauses < 0:
                raise DimacsError(lineno, "clause count must be >= 0")
            continue
        if num_vars is None:
            raise DimacsError(lineno, "clause before 'p cnf' header")
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise DimacsError(lineno, f"non-integer token {token!r}")
            if lit == 0:
                clauses.append(make_clause(pending))
                pending = []
            else:
                if abs(lit) > num_vars:
                    raise DimacsError(
                        lineno,
                        f"literal {lit} exceeds declared variable count {num_vars}",
                    )
                pending.append(lit)
    if num_vars is None:
        raise DimacsError(lineno, "missing 'p cnf' header")
    if pending:
        raise DimacsError(lineno, "unterminated clause (missing trailing 0)")
    if len(clauses) != num_clauses:
        raise DimacsError(
            lineno,
            f"header declares {num_clauses} clauses, found {len(clauses)}",
        )
    return CnfFormula(num_vars, tuple(clauses))


def to_dimacs(formula: CnfFormula, comments: Iterable[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {formula.num_vars} {len(formula.clauses)}")
    for clause in formula.clauses:
        lines.append(" ".join([*map(str, clause), "0"]))
    return "\n".join(lines) + "\n"


def _coerce_assignment(formula: CnfFormula, assignment: Sequence[int]) -> tuple[int, ...]:
    values = tuple(assignment)
    if len(values) != formula.num_vars:
        raise ValueError(
            f"assignment has {len(values)} entries, formula has {formula.num_vars} variables"
        )
    if any(v not in (0, 1) for v in values):
        raise ValueError("assignment must be total with values in {0, 1}")
    return values


def _literal_true(lit: Literal, values: Sequence[int | None]) -> bool | None:
    """Truth of a literal under a partial valuation; None when the variable is free."""
    v = values[abs(lit) - 1]
    if v is None:
        return None
    return (lit > 0) == (v == 1)


def evaluate(formula: CnfFormula, assignment: Sequence[int]) -> bool:
    """True iff every clause contains a literal made true by the total assignment."""
    values = _coerce_assignment(formula, assignment)
    for clause in formula.clauses:
        if not any((lit > 0) == (values[abs(lit) - 1] == 1) for lit in clause):
            return False
    return True


def restrict(formula: CnfFormula, rho: Restriction) -> CnfFormula:
    """Apply a restriction: drop satisfied clauses, delete false literals.

    The result keeps ``num_vars``; only free variables occur in its clauses.
    An empty clause may appear and witnesses the constant-0 subfunction.
    """
    if rho.num_vars != formula.num_vars:
        raise ValueError("restriction domain does not match formula variables")
    kept: list[Clause] = []
    for clause in formula.clauses:
        remaining: list[Literal] = []
        satisfied = False
        for lit in clause:
            t = _literal_true(lit, rho.values)
            if t is None:
                remaining.append(lit)
            elif t:
                satisfied = True
                break
        if not satisfied:
            kept.append(tuple(remaining))
    return CnfFormula(formula.num_vars, tuple(kept))


def is_implicant(formula: CnfFormula, rho: Restriction) -> bool:
    """True iff every completion of rho satisfies the formula.

    Equivalently, every non-tautological clause contains a literal fixed true
    by rho.  Tautological clauses are constant-true and never block.
    """
    if rho.num_vars != formula.num_vars:
        raise ValueError("restriction domain does not match formula variables")
    for clause in formula.clauses:
        if any(_literal_true(lit, rho.values) for lit in clause):
            continue
        if not is_tautological(clause):
            return False
    return True


def is_prime_implicant(formula: CnfFormula, rho: Restriction) -> bool:
    """An implicant none of whose fixed variables can be freed."""
    if not is_implicant(formula, rho):
        return False
    for var, _ in rho.fixed_items():
        if is_implicant(formula, rho.unfix(var)):
            return False
    return True


def preprocess(formula: CnfFormula) -> tuple[dict[int, int], CnfFormula]:
    """Remove tautological clauses and propagate unit clauses to a fixpoint.

    Returns the forced assignment (unit-implied variable values) and the
    simplified formula, which has no unit and no tautological clauses.  Every
    prime implicant of the input is the forced assignment combined with a
    prime implicant of the simplified formula.  Raises :class:`Unsatisfiable`
    when propagation derives an empty clause or conflicting units.
    """
    forced: dict[int, int] = {}
    clauses = [c for c in formula.clauses if not is_tautological(c)]
    while True:
        simplified: list[Clause] = []
        for clause in clauses:
            remaining: list[Literal] = []
            satisfied = False
            for lit in clause:
                val = forced.get(abs(lit))
                if val is None:
                    remaining.append(lit)
                elif (lit > 0) == (val == 1):
                    satisfied = True
                    break
            if satisfied:
                continue
            if not remaining:
                raise Unsatisfiable("empty clause derived during unit propagation")
            simplified.append(tuple(remaining))
        clauses = simplified
        units = [c[0] for c in clauses if len(c) == 1]
        if not units:
            break
        for lit in units:
            want = 1 if lit > 0 else 0
            current = forced.get(abs(lit))
            if current is not None and current != want:
                raise Unsatisfiable(f"conflicting unit clauses on variable {abs(lit)}")
            forced[abs(lit)] = want
    return forced, CnfFormula(formula.num_vars, tuple(clauses))
