#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

__all__ = [
    "ImproperlyConfigured",
    "SensorimotorException",
    "InvalidInputError",
    "InsufficientDataError",
    "DegenerateInputError",
    "SerializationError",
    "ParseError",
    "CorruptCheckpointError",
    "LogWriteError",
]


class ImproperlyConfigured(Exception):
    """
    Exception raised when the configuration passed to a constructor or read
    from a config file is inconsistent or invalid.
    """


class SensorimotorException(Exception):
    """
    Base class for all exceptions raised by this package's operations (doesn't
    apply to :class:`~sensorimotor.ImproperlyConfigured`).
    """


class InvalidInputError(SensorimotorException):
    """
    An operation was called with arguments outside its domain: non-finite
    numbers, positions outside the arena, out of range counts and so on.
    """


class InsufficientDataError(SensorimotorException):
    """
    Not enough records (after filtering) to perform the requested analysis.
    """


class DegenerateInputError(SensorimotorException):
    """ Geometry too degenerate for a metric to be defined. """


class SerializationError(SensorimotorException):
    """
    Data passed in failed to serialize properly in the ``JSONSerializer``.
    """


class ParseError(SensorimotorException):
    """
    A sensorimotor log could not be parsed. ``line`` is the 1-based line
    number in the file (the header is line 1).
    """

    @property
    def line(self):
        """ Line number of the offending row. """
        return self.args[0]

    @property
    def error(self):
        """ A string error message. """
        return self.args[1]

    def __str__(self):
        return "%s(line %s, %r)" % (self.__class__.__name__, self.line, self.error)


class CorruptCheckpointError(SensorimotorException):
    """
    The checkpoint does not belong to the configuration or the log it is
    being resumed against.
    """


class LogWriteError(SensorimotorException):
    """
    Writing to the log sink failed. The last checkpoint written before the
    failure is left untouched. The original ``OSError`` is available as
    ``.info``.
    """

    @property
    def path(self):
        return self.args[0]

    @property
    def info(self):
        return self.args[1]

    def __str__(self):
        return "LogWriteError(%s) caused by: %s(%s)" % (
            self.path,
            self.info.__class__.__name__,
            self.info,
        )
