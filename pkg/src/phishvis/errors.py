class CorpusError(ValueError):
    """Dataset root is missing or holds no class directories."""


class SchemaError(ValueError):
    """Feature dimensions or schemas do not line up."""


class FormatError(ValueError):
    """A cache or model file is truncated, corrupt or of an unknown version."""


class TrainingError(ValueError):
    """A classifier cannot be fitted to the given table."""
