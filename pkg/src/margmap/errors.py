"""Exception hierarchy.

Everything derived from :class:`MarginalityError` is an input or validation
problem (CLI exit code 1). :class:`InvariantBreach` signals that the library
caught itself producing something inconsistent (exit code 2).
"""


class MarginalityError(ValueError):
    """Base class for all input/validation errors."""


class TaxonomyError(MarginalityError):
    pass


class EmptyDocument(TaxonomyError):
    pass


class MalformedTaxonomy(TaxonomyError):
    pass


class CycleDetected(TaxonomyError):
    pass


class MultipleRoots(TaxonomyError):
    pass


class NoRoot(TaxonomyError):
    pass


class DuplicateChildDefinition(TaxonomyError):
    pass


class DepthExceedsBound(TaxonomyError):
    pass


class UnknownCategory(MarginalityError):
    def __init__(self, category, row=None, attribute=None):
        self.category = category
        self.row = row
        self.attribute = attribute
        where = []
        if row is not None:
            where.append(f"row {row}")
        if attribute is not None:
            where.append(f"attribute {attribute!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"unknown category {category!r}{suffix}")


class EmptySample(MarginalityError):
    pass


class DepthExceedsWeightTable(MarginalityError):
    pass


class LengthMismatch(MarginalityError):
    pass


class SchemaError(MarginalityError):
    pass


class HeaderMismatch(MarginalityError):
    pass


class RaggedRow(MarginalityError):
    pass


class UnparseableNumber(MarginalityError):
    pass


class NonFiniteNumber(MarginalityError):
    pass


class EmptyTable(MarginalityError):
    pass


class UnboundTaxonomy(MarginalityError):
    pass


class NotNominal(MarginalityError):
    pass


class ChecksumMismatch(MarginalityError):
    pass


class SchemaMismatch(MarginalityError):
    pass


class AllAttributesExcluded(MarginalityError):
    pass


class KTooSmall(MarginalityError):
    pass


class KTooLarge(MarginalityError):
    pass


class StaleGrouping(MarginalityError):
    pass


class InvariantBreach(RuntimeError):
    """An internal consistency check failed."""


class ReversibilityError(InvariantBreach):
    """Treatment perturbed the marginality mapping of a nominal attribute."""
