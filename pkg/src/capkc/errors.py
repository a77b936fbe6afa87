"""Exception hierarchy shared by the whole package."""


class CapkcError(Exception):
    """Base class for all package errors."""


class InputError(CapkcError):
    """Malformed user input: files, CLI arguments, out-of-range parameters."""


class ValidationError(CapkcError):
    """A structure fails its definition; the message names the violated clause."""


class PipelineError(CapkcError):
    """An internal stage contract was broken.  Always a bug, never bad input."""
