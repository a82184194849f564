#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

try:
    import simplejson as json
except ImportError:
    import json

import math

import numpy as np

from .exceptions import SerializationError

INTEGER_TYPES = (np.integer,)
FLOAT_TYPES = (np.floating,)


class JSONSerializer(object):
    """
    Serializer used for checkpoints, run manifests and analysis reports.

    Keys are sorted and separators fixed so that the same data always renders
    to the same bytes. Non-finite floats (empty cells, undefined correlations)
    are written as ``null``.

    :arg indent: pretty-print indentation, ``None`` for compact output
    """

    def __init__(self, indent=2):
        self.indent = indent

    def default(self, data):
        if isinstance(data, FLOAT_TYPES):
            return _finite_or_none(float(data))
        elif isinstance(data, INTEGER_TYPES):
            return int(data)
        elif isinstance(data, np.bool_):
            return bool(data)
        elif isinstance(data, np.ndarray):
            return _clean(data.tolist())
        elif isinstance(data, (set, frozenset)):
            return sorted(data)

        raise TypeError("Unable to serialize %r (type: %s)" % (data, type(data)))

    def loads(self, s):
        try:
            return json.loads(s)
        except (ValueError, TypeError) as e:
            raise SerializationError(s, e)

    def dumps(self, data):
        try:
            return json.dumps(
                _clean(data),
                default=self.default,
                sort_keys=True,
                indent=self.indent,
                separators=(",", ": ") if self.indent is not None else (",", ":"),
                allow_nan=False,
            )
        except (ValueError, TypeError) as e:
            raise SerializationError(data, e)


def _finite_or_none(value):
    return value if math.isfinite(value) else None


def _clean(data):
    # json would happily emit NaN, which is not JSON
    if isinstance(data, float):
        return _finite_or_none(data)
    if hasattr(data, "_asdict"):
        return _clean(dict(data._asdict()))
    if isinstance(data, dict):
        return dict((k, _clean(v)) for k, v in data.items())
    if isinstance(data, (list, tuple)):
        return [_clean(v) for v in data]
    return data


DEFAULT_SERIALIZER = JSONSerializer()
