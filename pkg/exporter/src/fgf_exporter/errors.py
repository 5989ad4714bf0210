"""Exception types for the exporter."""


class ExportError(Exception):
    """Base class for exporter failures."""


class InputError(ExportError):
    """Records file or field selection is unusable."""


class SetupError(ExportError):
    """An encoder backend could not be constructed or loaded."""
