"""Run the engine over a line stream: stdio, a recorded log, or a TCP connection."""

from __future__ import annotations

import logging
import socketserver
from typing import IO, Iterable

from ..engine import Engine
from ..model import CohostError
from .protocol import ProtocolError, decode_event, encode_action, error_record

log = logging.getLogger(__name__)


def serve_lines(lines: Iterable[str], write, engine: Engine | None = None) -> int:
    """Feed decoded events to ``engine`` in read order, writing one record per action.

    Malformed or rejected lines produce an ``error`` record and leave the engine
    untouched. Returns the number of error records written.
    """
    engine = engine if engine is not None else Engine()
    errors = 0
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        last = engine.state.last_t_ms if engine.state is not None else 0
        try:
            event = decode_event(line)
            actions = engine.feed(event)
        except (ProtocolError, CohostError, ValueError) as exc:
            errors += 1
            write(encode_action(error_record(exc, last)) + "\n")
            continue
        for action in actions:
            write(encode_action(action) + "\n")
    return errors


def serve_stream(infile: IO[str], outfile: IO[str]) -> int:
    def write(s: str) -> None:
        outfile.write(s)
        outfile.flush()

    return serve_lines(infile, write)


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        peer = self.client_address
        log.info("connection from %s", peer)
        reader = (raw.decode("utf-8", errors="replace") for raw in self.rfile)

        def write(s: str) -> None:
            self.wfile.write(s.encode("utf-8"))
            self.wfile.flush()

        # one meeting per connection
        errors = serve_lines(reader, write)
        log.info("connection %s closed (%d error record(s))", peer, errors)


class MeetingServer(socketserver.TCPServer):
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int]) -> None:
        super().__init__(address, _Handler)


def serve_tcp(host: str, port: int) -> None:
    with MeetingServer((host, port)) as srv:
        log.info("listening on %s:%d", *srv.server_address[:2])
        srv.serve_forever()
