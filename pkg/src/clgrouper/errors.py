"""Exception and warning types shared across the package."""


class ClgrouperError(Exception):
    """Base class for every error this package raises deliberately."""


class InvalidTreeError(ClgrouperError):
    """A tree violates a structural invariant (cycle, disconnection, bad lengths)."""


class InvalidMatrixError(ClgrouperError):
    """A distance matrix violates symmetry, zero-diagonal, or positivity."""


class InvalidRankingError(ClgrouperError):
    """A vertex ranking is not a bijection onto 1..n."""


class TaxonMismatchError(ClgrouperError):
    """Two objects that must share a taxon set do not."""


class ContractViolationError(ClgrouperError):
    """An operation was called outside its contract (e.g. union of non-roots)."""


class SizeGuardError(ClgrouperError):
    """A brute-force oracle was asked to run beyond its hard size limit."""


class NewickParseError(ClgrouperError):
    """Malformed tree text; carries the character offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class MatrixFormatError(ClgrouperError):
    """A distance-matrix file is malformed."""


class EdgeListFormatError(ClgrouperError):
    """An edge-list file is malformed."""


class NonAdditivityWarning(UserWarning):
    """Input distances are not tree-additive; guarantees that need additivity are void."""
