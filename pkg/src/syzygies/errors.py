"""Exception taxonomy shared by all modules."""


class SyzygiesError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInputError(SyzygiesError):
    """Inconsistent input data (mixed fields, ring mismatch, bad config)."""


class RingMismatchError(MalformedInputError):
    """Operands belong to different rings."""


class ResourceLimitError(SyzygiesError):
    """A configured degree / pair-count / size cap was exceeded.

    Signals that the requested computation is beyond desk scale, never
    silently truncated.
    """


class CombinatorialBlowupError(ResourceLimitError):
    """A wedge-power dimension count exceeded its configured cap."""


class IncompletePresentationError(SyzygiesError):
    """A presentation's relations are not complete through the degree needed."""


class RangeTooSmallError(SyzygiesError):
    """A Betti-table window is too narrow to support the requested statement."""


class InsufficientDataError(SyzygiesError):
    """Graded module data not populated far enough for the requested cell."""


class VanishingCertificateError(SyzygiesError):
    """The fixture cannot certify the cohomology vanishing a finite check needs."""


class RetriesExhaustedError(SyzygiesError):
    """Seeded generic choices kept failing certification (non-generic family)."""


class NotFoundWithinBoundError(SyzygiesError):
    """A search (e.g. for the Mumford regularity) ran out of its bound."""


class UnsupportedFixtureError(SyzygiesError):
    """Fixture / cohomology-index combination outside the supported closed forms."""
