"""Exception hierarchy shared across the package."""


class PartialDPError(Exception):
    """Base class for all errors raised by partialdp."""


class SchemaMismatch(PartialDPError, ValueError):
    """Records or datasets disagree on the number of attributes."""


class MalformedCell(PartialDPError, ValueError):
    """A dataset file holds a cell outside {0, 1} or a ragged row."""


class PreconditionError(PartialDPError, ValueError):
    """A documented mechanism precondition does not hold."""


class IncompatibleBudgets(PartialDPError, ValueError):
    """Budgets from the pure and concentrated families were mixed."""


class TupleExplosion(PartialDPError, RuntimeError):
    """Too many attribute-disjoint query tuples to enumerate."""


class NetExplosion(PartialDPError, RuntimeError):
    """The requested l1-net is larger than the enumeration cap."""


class DomainTooLarge(PartialDPError, RuntimeError):
    """A brute-force path was asked to enumerate too many records."""
