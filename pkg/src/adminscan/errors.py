"""Exception hierarchy shared across the adminscan modules.

``InvalidInput`` subclasses signal problems with user-supplied data and map
to CLI exit code 2; every other ``AdminscanError`` maps to exit code 1.
"""

from __future__ import annotations

__all__ = [
    "AdminscanError",
    "InvalidInput",
    "CorpusIOError",
    "EmptyCorpus",
    "InvalidConfidence",
    "SampleTooLarge",
    "TooFewSamples",
    "SingleClassTraining",
    "UnsupportedModelKind",
    "NoSuccessfulModels",
    "NotTrustee",
    "ActionAlreadyActivated",
    "ClockWentBackwards",
    "PauseCooldownActive",
    "GuardFailedPaused",
    "GuardFailedUnpaused",
    "InvalidBoard",
    "InvalidConfig",
    "MalformedScript",
]


class AdminscanError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(AdminscanError):
    """User-supplied data is unusable as given."""


class CorpusIOError(AdminscanError):
    """A corpus root or store could not be read or written."""


class EmptyCorpus(InvalidInput):
    """No eligible source files were found under the ingest root."""


class InvalidConfidence(InvalidInput):
    """Confidence level outside the half-open interval [0, 1)."""


class SampleTooLarge(InvalidInput):
    """Requested sample size exceeds the population."""


class TooFewSamples(InvalidInput):
    """Not enough labeled samples for the requested fold count."""


class SingleClassTraining(InvalidInput):
    """Training data contains only one class where two are required."""


class UnsupportedModelKind(AdminscanError):
    """The model kind is registered but has no trainer."""


class NoSuccessfulModels(AdminscanError):
    """Every evaluated model kind failed, so none can be selected."""


class GovernanceError(AdminscanError):
    """Base class for governance state machine rejections."""


class NotTrustee(GovernanceError):
    """Caller is not a member of the trustee board."""


class ActionAlreadyActivated(GovernanceError):
    """The action was activated before and cannot be voted on again."""


class ClockWentBackwards(GovernanceError):
    """An operation carried a timestamp earlier than the last recorded one."""


class PauseCooldownActive(GovernanceError):
    """A pause was requested before the re-pause cooldown elapsed."""


class GuardFailedPaused(GovernanceError):
    """A when-paused guard was evaluated while the contract was not paused."""


class GuardFailedUnpaused(GovernanceError):
    """A when-unpaused guard was evaluated while the contract was paused."""


class InvalidBoard(InvalidInput):
    """Trustee board is structurally invalid."""


class InvalidConfig(InvalidInput):
    """Governance durations are structurally invalid."""


class MalformedScript(InvalidInput):
    """A scenario script failed structural validation."""
