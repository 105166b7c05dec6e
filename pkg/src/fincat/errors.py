"""Exception types shared across the engine.

Every error that carries mathematical content also carries a machine-readable
witness so the CLI can report it without string-parsing.
"""


class EngineError(Exception):
    """Base class for everything raised on purpose by this package."""


class InvalidCategory(EngineError):
    """Composition tables violate the category laws."""

    def __init__(self, violations):
        self.violations = list(violations)
        head = ", ".join(v.code for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else ", ..."
        super().__init__(f"{len(self.violations)} violation(s): {head}{more}")


class InvalidFunctor(EngineError):
    """A functor candidate fails preservation of endpoints/ids/composites."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"{len(self.violations)} functor violation(s)")


class InvalidTransformation(EngineError):
    """A naturality square fails, or components are missing/ill-typed."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"{len(self.violations)} naturality violation(s)")


class InvalidSquare(EngineError):
    """A commutative-square candidate does not commute or mistypes."""


class EnumerationBudgetExceeded(EngineError):
    """An exhaustive search would visit more candidates than allowed."""

    def __init__(self, candidates, budget):
        self.candidates = candidates
        self.budget = budget
        super().__init__(f"search needs {candidates} candidates, budget {budget}")


class NotFullSubcategory(EngineError):
    """Strict preimage restriction hit a non-full (or non-replete) subset."""

    def __init__(self, reason, witness):
        self.reason = reason
        self.witness = witness
        super().__init__(f"{reason}: {witness}")


class NotColimiting(EngineError):
    """An operation required a colimiting cocone and was given one that isn't."""


class MissingColimit(EngineError):
    """A required colimit does not exist in the (finite) ambient category.

    `description` says which construction failed; `diagram` is a compact
    description of the offending diagram (vertex/edge data).
    """

    def __init__(self, description, diagram=None):
        self.description = description
        self.diagram = diagram
        super().__init__(description)


class PreconditionFailed(EngineError):
    """A checked precondition does not hold for the given inputs."""

    def __init__(self, reason, witness=None):
        self.reason = reason
        self.witness = witness
        super().__init__(reason if witness is None else f"{reason}: {witness}")


class Exhausted(EngineError):
    """An iteration hit its truncation bound before converging."""

    def __init__(self, bound, detail=""):
        self.bound = bound
        super().__init__(f"no convergence within bound {bound}" + (f" ({detail})" if detail else ""))


class InvariantViolation(EngineError):
    """A theorem-backed equivalence failed; indicates a bug, never expected."""


class FunctorialityFailure(EngineError):
    """A factorisation's action on squares fails identity/composition laws."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"functoriality broken at {witness}")


class ParseError(EngineError):
    """Positioned syntax error in a text input file."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = "" if line is None else f" (line {line}" + ("" if column is None else f", col {column}") + ")"
        super().__init__(message + where)
