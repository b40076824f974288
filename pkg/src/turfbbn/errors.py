"""Exception hierarchy for the turfbbn package."""

from __future__ import annotations


class TurfBbnError(Exception):
    """Base class for all turfbbn errors."""


# --- network construction / validation ---------------------------------------


class CycleDetected(TurfBbnError):
    """The directed graph contains a cycle (self-loops included)."""


class CptShapeMismatch(TurfBbnError):
    """A CPT's parent list disagrees with the graph structure."""


class RowNotNormalized(TurfBbnError):
    """A CPT row does not sum to 1 within tolerance."""


class UnknownVariable(TurfBbnError):
    """A referenced variable is not declared."""


class UnknownState(TurfBbnError):
    """A referenced state does not exist for its variable."""


class UnknownEdge(TurfBbnError):
    """A referenced edge is not present in the graph."""


class ParseError(TurfBbnError):
    """A document could not be parsed; carries a location hint."""

    def __init__(self, message: str, *, location: str | None = None):
        self.location = location
        super().__init__(f"{message} (at {location})" if location else message)


# --- structure learning -------------------------------------------------------


class EmptyDataset(TurfBbnError):
    """The dataset has no rows, so nothing can be scored or fitted."""


class TooManyVariables(TurfBbnError):
    """Exhaustive DAG enumeration is limited to small variable counts."""


class InfeasibleConstraints(TurfBbnError):
    """The edge constraints admit no acyclic graph."""


# --- inference ----------------------------------------------------------------


class ZeroProbabilityEvidence(TurfBbnError):
    """The conditioning evidence has probability zero under the network."""


class AllZeroWeights(TurfBbnError):
    """Every sample weight is zero: the evidence is impossible."""


class InconsistentQuery(TurfBbnError):
    """Event and evidence constrain a shared variable to disjoint state sets."""


class ThresholdNotACutPoint(TurfBbnError):
    """A requested threshold is not a bin boundary of the target variable."""


# --- fishery metrics ----------------------------------------------------------


class InvalidArrangement(TurfBbnError):
    """A surveillance arrangement outside the ranking tree's five leaves."""


class EmptySample(TurfBbnError):
    """An operation received an empty measurement sample."""


class AllZeroDifferences(TurfBbnError):
    """All paired differences are zero; the signed-rank test is degenerate."""


class DegenerateGeometry(TurfBbnError):
    """Both the open-access and management areas have zero surface."""


# --- ingestion / discretization -----------------------------------------------


class SchemaError(TurfBbnError):
    """An input file does not match its documented schema."""


class RangeError(TurfBbnError):
    """A field value is outside its permitted range."""

    def __init__(self, message: str, *, rows: list[tuple[int, str]] | None = None):
        self.rows = rows or []
        super().__init__(message)


class UncoveredValue(TurfBbnError):
    """A value is not covered by the discretization rule for its variable."""
