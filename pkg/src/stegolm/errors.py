"""Exception hierarchy for the codec.

Every failure mode callers are expected to handle gets its own class so that
tests and the CLI can match on type rather than message text.
"""


class StegoError(Exception):
    """Base class for all codec errors."""


# --- distribution validation ---

class NegativeProbabilityError(StegoError):
    pass


class DuplicateTokenError(StegoError):
    pass


class IdOutOfRangeError(StegoError):
    pass


class MassOutOfBoundsError(StegoError):
    pass


class EmptyDistributionError(StegoError):
    pass


# --- framing and coding ---

class MessageTooLongError(StegoError):
    pass


class TokenNotInPoolError(StegoError):
    """Receiver saw a token outside the pool it rebuilt: model or parameter
    mismatch between sender and receiver."""


# --- pipeline ---

class CapacityExceededError(StegoError):
    """Generation ended before the framed message was fully embedded."""


class IncompleteMessageError(StegoError):
    """Token sequence exhausted before the framed message completed."""


# --- metrics ---

class EmptyOutputError(StegoError):
    pass


class ZeroProbabilityTokenError(StegoError):
    """Scoring model assigned zero probability to an observed token."""


# --- model backends ---

class BackendError(StegoError):
    """Base class for model-backend failures."""


class UnknownBackendError(BackendError):
    pass


class BackendUnavailableError(BackendError):
    """Backend could not be opened (bad path, dead process, failed handshake)."""


class StepLimitExceededError(BackendError):
    pass


class ReplayExhaustedError(BackendError):
    pass


class BridgeProtocolError(BackendError):
    pass
