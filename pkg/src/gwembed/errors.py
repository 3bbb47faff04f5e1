"""Exception hierarchy.

Data problems (bad matrices, bad files, disconnected graphs) derive from
:class:`DataError`; optimisation blow-ups derive from :class:`NumericalError`.
The CLI maps the two families onto distinct exit codes.
"""


class GwEmbedError(Exception):
    """Base class for every error raised by this package."""


class DataError(GwEmbedError, ValueError):
    pass


class NumericalError(GwEmbedError, ArithmeticError):
    pass


class NonSquareError(DataError):
    pass


class AsymmetryError(DataError):
    pass


class NegativeEntryError(DataError):
    pass


class NonFiniteError(DataError):
    pass


class ShapeMismatchError(DataError):
    pass


class MarginalError(DataError):
    pass


class DimTooLargeError(DataError):
    pass


class KTooLargeError(DataError):
    pass


class DisconnectedGraphError(DataError):
    """The k-NN graph has more than one connected component."""

    def __init__(self, component_sizes):
        self.component_sizes = sorted((int(s) for s in component_sizes), reverse=True)
        self.n_components = len(self.component_sizes)
        super().__init__(
            f"neighbour graph is disconnected: {self.n_components} components "
            f"with sizes {self.component_sizes}; try a larger k"
        )


class ConstantDistancesError(DataError):
    pass


class IdxFormatError(DataError):
    pass


class BadMagicError(IdxFormatError):
    pass


class TruncatedFileError(IdxFormatError):
    pass


class CsvFormatError(DataError):
    pass


class RaggedRowsError(CsvFormatError):
    pass


class NonNumericCellError(CsvFormatError):
    pass


class DivergenceError(NumericalError):
    """Raised when the embedding cost blows up, usually a too-large learning rate."""
