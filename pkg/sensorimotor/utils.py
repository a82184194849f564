#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import hashlib
import math
import os
import tempfile
from contextlib import contextmanager

import numpy as np

from .exceptions import InvalidInputError
from .serializer import JSONSerializer

TWO_PI = 2.0 * math.pi

_digest_serializer = JSONSerializer(indent=None)


def wrap_angle(angle):
    """
    Wrap an angle (or an array of angles) into ``(-pi, pi]``.
    """
    if isinstance(angle, np.ndarray):
        return angle - TWO_PI * np.ceil((angle - math.pi) / TWO_PI)
    return angle - TWO_PI * math.ceil((angle - math.pi) / TWO_PI)


def require_finite(name, *values):
    """
    Raise :class:`~sensorimotor.InvalidInputError` unless every value is a
    finite number.
    """
    for value in values:
        if not np.all(np.isfinite(value)):
            raise InvalidInputError("%s must be finite, got %r" % (name, value))


def content_digest(data):
    """
    SHA-256 hex digest of the canonical (sorted keys, compact) JSON rendering
    of ``data``.
    """
    raw = _digest_serializer.dumps(data).encode("utf-8")
    return hashlib.sha256(raw).hexdigest()


@contextmanager
def atomic_write(path, mode="w", newline="\n"):
    """
    Open a temporary file next to ``path`` and move it over ``path`` once the
    block exits cleanly. On error the temporary file is removed and ``path``
    is left as it was.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".%s." % os.path.basename(path), dir=directory)
    try:
        if "b" in mode:
            f = os.fdopen(fd, mode)
        else:
            f = os.fdopen(fd, mode, encoding="utf-8", newline=newline)
        with f:
            yield f
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
