"""Exception types shared across the toolkit."""


class GlossWsdError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(GlossWsdError):
    """Invalid run configuration (unknown key, missing path, bad value)."""


class DataError(GlossWsdError):
    """Input data is missing, malformed, or inconsistent."""


class MalformedLineError(DataError):
    """A database file line violates the expected grammar."""

    def __init__(self, file: str, line_no: int, reason: str = ""):
        self.file = file
        self.line_no = line_no
        self.reason = reason
        msg = f"{file}:{line_no}: malformed line"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class DanglingPointerError(DataError):
    """A pointer references a synset offset that does not exist."""

    def __init__(self, source: str, target: str):
        self.source = source
        self.target = target
        super().__init__(f"pointer from {source} to missing synset {target}")


class UnknownSynsetError(DataError):
    def __init__(self, synset_id):
        self.synset_id = synset_id
        super().__init__(f"unknown synset {synset_id}")


class MalformedXmlError(DataError):
    """Corpus XML cannot be parsed or lacks required attributes."""


class MissingGoldError(DataError):
    """A tagged instance has no entry in the gold key file."""

    def __init__(self, instance_id: str):
        self.instance_id = instance_id
        super().__init__(f"no gold key for instance {instance_id}")


class UnresolvableKeyError(DataError):
    """A sense key does not resolve against the loaded lexicon."""

    def __init__(self, raw: str):
        self.raw = raw
        super().__init__(f"sense key {raw!r} does not resolve")


class NotAnInstanceError(GlossWsdError):
    """The targeted token is not a tagged instance."""


class EmptyInputError(GlossWsdError):
    """An operation received an empty sequence where one is required."""


class ShapeMismatchError(GlossWsdError):
    """Vector or gradient dimensions do not agree."""


class ZeroVectorError(GlossWsdError):
    """Cosine-based quantity requested for a zero-norm vector."""


class EmptyBatchError(GlossWsdError):
    """A batch-level loss received an empty batch."""


class TrainingError(GlossWsdError):
    """Training could not complete."""


class DivergenceError(TrainingError):
    """Loss became non-finite; training aborted.

    ``checkpoint`` names the last finite parameter snapshot written
    before the abort, when one exists.
    """

    def __init__(self, step: int, checkpoint=None):
        self.step = step
        self.checkpoint = checkpoint
        super().__init__(f"non-finite loss at step {step}")


class DuplicatePredictionError(GlossWsdError):
    def __init__(self, instance_id: str):
        self.instance_id = instance_id
        super().__init__(f"duplicate prediction for instance {instance_id}")
