"""Exception types shared across the toolkit."""


class DataError(Exception):
    """Malformed or inconsistent input data: corpora, datasets, run files."""


class ScorerError(Exception):
    """A successor scorer failed: subprocess death, protocol violation, or timeout."""

    def __init__(self, message: str, pair_ids=None):
        super().__init__(message)
        self.pair_ids = list(pair_ids or [])
