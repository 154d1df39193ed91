"""Canonical JSON serialization.

Every byte sequence this repo emits for comparison purposes (wire payloads,
trajectory files, registry records, compliance reports) goes through this
encoder so that two independent implementations can be diffed byte-for-byte:

  * object keys sorted lexicographically,
  * no insignificant whitespace,
  * integral numbers without a fractional part (1.0 encodes as ``1``),
  * non-integral numbers as the shortest decimal that round-trips,
  * strings minimally escaped, non-ASCII kept as raw UTF-8.

NaN and infinities have no canonical form and are rejected.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .errors import EncodingFault, ParseFault

# Beyond 2**53 a float no longer distinguishes consecutive integers, so the
# integral rule only applies below that bound.
_MAX_SAFE_INTEGER = 2**53


def _encode_number(value: float) -> str:
    if math.isnan(value) or math.isinf(value):
        raise EncodingFault(f"value has no canonical form: {value!r}")
    if value.is_integer() and abs(value) < _MAX_SAFE_INTEGER:
        return str(int(value))
    return repr(value)


def _encode(value: Any, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(_encode_number(value))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _encode(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise EncodingFault(f"object keys must be strings, got {key!r}")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _encode(value[key], out)
        out.append("}")
    else:
        raise EncodingFault(f"value has no canonical form: {type(value).__name__}")


def dumps(value: Any) -> str:
    """Canonical serialization of a JSON-compatible value, as text."""
    out: list[str] = []
    _encode(value, out)
    return "".join(out)


def dump_bytes(value: Any) -> bytes:
    """Canonical serialization as UTF-8 bytes."""
    return dumps(value).encode("utf-8")


def loads(data: bytes | str) -> Any:
    """Parse JSON, accepting non-canonical but well-formed input."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseFault(f"payload is not valid UTF-8: {exc}") from exc

    def _reject_constant(name: str) -> Any:
        raise ParseFault(f"non-finite number literal: {name}")

    try:
        return json.loads(data, parse_constant=_reject_constant)
    except ParseFault:
        raise
    except json.JSONDecodeError as exc:
        raise ParseFault(f"malformed JSON: {exc}") from exc
