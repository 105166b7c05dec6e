"""Structured pass/fail results with machine-readable witnesses."""

from dataclasses import dataclass, field


def jsonable(value):
    """Recursively turn tuples/frozensets into JSON-friendly lists."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    return value


@dataclass(frozen=True)
class Verdict:
    """Outcome of a checked property.

    holds     -- the property held
    witnesses -- one entry per failure (or informational record); each entry
                 is a dict of plain strings/lists so reports serialize as-is
    skipped   -- number of cases skipped by an explicit skip rule
    """

    holds: bool
    witnesses: tuple = ()
    skipped: int = 0

    def __bool__(self):
        return self.holds

    def as_json(self):
        return {
            "holds": self.holds,
            "witnesses": [jsonable(w) for w in self.witnesses],
            "skipped": self.skipped,
        }
