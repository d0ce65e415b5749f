"""Wire protocol, chart rendering and the command-line surface."""

from .protocol import (
    ErrorRecord,
    ProtocolError,
    decode,
    decode_action,
    decode_event,
    encode,
    encode_action,
    encode_event,
)
from .render import RenderError, render_chart

__all__ = [
    "ErrorRecord",
    "ProtocolError",
    "RenderError",
    "decode",
    "decode_action",
    "decode_event",
    "encode",
    "encode_action",
    "encode_event",
    "render_chart",
]
