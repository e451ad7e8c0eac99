"""Exception types shared across the package.

Every error raised on a documented failure path derives from VqBevError so
callers (and the CLI) can separate contract violations from genuine bugs.
"""


class VqBevError(Exception):
    """Base class for all package errors."""


class ParameterError(VqBevError):
    """An input parameter is outside its documented range; names the field."""


class ShapeError(VqBevError):
    """Array dimensions do not match the documented contract."""


class CalibrationError(VqBevError):
    """A camera definition is unusable (bad intrinsics/extrinsics)."""


class ConfigError(VqBevError):
    """Configuration failed validation; names the key and its bound."""


class StorageError(VqBevError):
    """An artifact could not be read or written; carries the path."""


class FormatError(VqBevError):
    """A binary artifact has the wrong magic, version, or structure."""


class DataError(VqBevError):
    """A dataset is empty or inconsistent with its manifest."""


class DivergenceError(VqBevError):
    """Training produced a non-finite loss; carries the epoch index."""


class DegenerateInputError(VqBevError):
    """An input with no defined result, e.g. a zero vector fed to lookup."""


class StateError(VqBevError):
    """An operation was called on a model in the wrong state."""


class DependencyError(VqBevError):
    """A required upstream artifact (checkpoint, codebook) is missing."""


class EmptyTargetError(VqBevError):
    """A loss or metric was asked to average over zero valid cells."""
