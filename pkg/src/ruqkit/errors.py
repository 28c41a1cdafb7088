class DataError(ValueError):
    """Invalid corpus, score-file, model, or embedding data. Mapped to exit code 2 by the CLI."""


class UsageError(Exception):
    """Bad command-line invocation. Mapped to exit code 1 by the CLI."""
