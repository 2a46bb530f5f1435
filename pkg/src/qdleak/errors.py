"""Exception types shared across the package.

Plain argument mistakes (bad indices, mismatched shapes, out-of-range
parameters) raise ValueError; the classes here mark failures of numerical
contracts that callers may want to handle separately, e.g. to map them to
a distinct process exit code.
"""


class QDLeakError(Exception):
    """Base class for numerical-contract failures."""


class DimensionLimitError(QDLeakError):
    """A requested operator or state would exceed the dimension ceiling."""


class DegeneracyError(QDLeakError):
    """Rank-deficient or degenerate input where a full-rank one is required."""


class ContractError(QDLeakError):
    """A runtime invariant was violated (non-unitary operator, wrong setup)."""
