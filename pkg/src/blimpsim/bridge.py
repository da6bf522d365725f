"""Live telemetry/command gateway.

Wire protocol (version 1): newline-delimited JSON text messages over a local
stream socket. The server greets each client with a ``hello`` and then streams
``state`` at 30 Hz; clients may send ``cmd`` (manual axes, zero-order held),
``mode``, ``goal``, and ``reset``. Unknown message types are ignored with a
warning; malformed lines warn and never kill the connection.

Clients may also connect with a WebSocket handshake on the same port (the
server sniffs the HTTP upgrade); each text frame then carries the same
newline-terminated JSON lines, which is how the browser cockpit attaches.

One simulation thread owns all mutable state and paces the fixed-dt pipeline
at wall-clock rate; lag is absorbed by running extra fixed steps, never by a
larger dt. I/O threads only move encoded lines through bounded queues, and a
client appearing, misbehaving, or vanishing cannot perturb the simulation.
"""

from __future__ import annotations

import base64
import collections
import hashlib
import json
import logging
import math
import queue
import signal
import socket
import struct
import threading
import time
from dataclasses import dataclass

import numpy as np

from .actuation import ActuatorCommand
from .control import ManualInput
from .runner import MODE_MANUAL, CommandTrace, SimCore, StepRecord, TrajectoryLog
from .scenario import MODE_AUTOPILOT, ScenarioConfig

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
STATE_RATE_HZ = 30.0
_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


class ProtocolError(ValueError):
    """A line that does not decode to a valid protocol message."""


@dataclass(frozen=True)
class HelloMsg:
    version: int
    scenario: str


@dataclass(frozen=True)
class StateMsg:
    t: float
    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    attitude: tuple[float, float, float]  # phi, theta, psi
    angular_velocity: tuple[float, float, float]
    command: tuple[float, float, float, float]  # f1, f2, theta1, theta2
    wind: tuple[float, float, float]
    mode: str
    contact: bool


@dataclass(frozen=True)
class CmdMsg:
    surge: float
    heave: float
    yaw: float
    roll: float


@dataclass(frozen=True)
class ModeMsg:
    value: str


@dataclass(frozen=True)
class GoalMsg:
    value: tuple[float, float, float]


@dataclass(frozen=True)
class ResetMsg:
    pass


Message = HelloMsg | StateMsg | CmdMsg | ModeMsg | GoalMsg | ResetMsg


def encode(msg: Message) -> str:
    """One JSON line (without the trailing newline) for any message."""
    if isinstance(msg, HelloMsg):
        obj = {"type": "hello", "version": msg.version, "scenario": msg.scenario}
    elif isinstance(msg, StateMsg):
        obj = {
            "type": "state",
            "t": msg.t,
            "position": list(msg.position),
            "velocity": list(msg.velocity),
            "attitude": list(msg.attitude),
            "angular_velocity": list(msg.angular_velocity),
            "command": {
                "f1": msg.command[0],
                "f2": msg.command[1],
                "theta1": msg.command[2],
                "theta2": msg.command[3],
            },
            "wind": list(msg.wind),
            "mode": msg.mode,
            "contact": msg.contact,
        }
    elif isinstance(msg, CmdMsg):
        obj = {"type": "cmd", "surge": msg.surge, "heave": msg.heave, "yaw": msg.yaw, "roll": msg.roll}
    elif isinstance(msg, ModeMsg):
        obj = {"type": "mode", "value": msg.value}
    elif isinstance(msg, GoalMsg):
        obj = {"type": "goal", "value": list(msg.value)}
    elif isinstance(msg, ResetMsg):
        obj = {"type": "reset"}
    else:
        raise TypeError(f"not a protocol message: {msg!r}")
    return json.dumps(obj, separators=(",", ":"))


def _field(obj: dict, key: str, line: str):
    if key not in obj:
        raise ProtocolError(f"message missing field {key!r}: {line!r}")
    return obj[key]


def _num(obj: dict, key: str, line: str) -> float:
    value = _field(obj, key, line)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ProtocolError(f"field {key!r} must be a finite number: {line!r}")
    return float(value)


def _triple(obj: dict, key: str, line: str) -> tuple[float, float, float]:
    value = _field(obj, key, line)
    if not isinstance(value, list) or len(value) != 3:
        raise ProtocolError(f"field {key!r} must be a 3-list: {line!r}")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ProtocolError(f"field {key!r} must hold finite numbers: {line!r}")
        out.append(float(v))
    return (out[0], out[1], out[2])


def decode(line: str) -> Message:
    """Parse one line into its message; raises ProtocolError otherwise."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {line!r} ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise ProtocolError(f"message must be a JSON object: {line!r}")
    kind = obj.get("type")
    if kind == "hello":
        version = _field(obj, "version", line)
        scenario = _field(obj, "scenario", line)
        if not isinstance(version, int) or isinstance(version, bool) or not isinstance(scenario, str):
            raise ProtocolError(f"malformed hello: {line!r}")
        return HelloMsg(version=version, scenario=scenario)
    if kind == "state":
        cmd = _field(obj, "command", line)
        if not isinstance(cmd, dict):
            raise ProtocolError(f"state.command must be an object: {line!r}")
        mode = _field(obj, "mode", line)
        contact = _field(obj, "contact", line)
        if mode not in (MODE_MANUAL, MODE_AUTOPILOT) or not isinstance(contact, bool):
            raise ProtocolError(f"malformed state: {line!r}")
        return StateMsg(
            t=_num(obj, "t", line),
            position=_triple(obj, "position", line),
            velocity=_triple(obj, "velocity", line),
            attitude=_triple(obj, "attitude", line),
            angular_velocity=_triple(obj, "angular_velocity", line),
            command=(
                _num(cmd, "f1", line),
                _num(cmd, "f2", line),
                _num(cmd, "theta1", line),
                _num(cmd, "theta2", line),
            ),
            wind=_triple(obj, "wind", line),
            mode=mode,
            contact=contact,
        )
    if kind == "cmd":
        return CmdMsg(
            surge=_num(obj, "surge", line),
            heave=_num(obj, "heave", line),
            yaw=_num(obj, "yaw", line),
            roll=_num(obj, "roll", line),
        )
    if kind == "mode":
        value = _field(obj, "value", line)
        if value not in (MODE_MANUAL, MODE_AUTOPILOT):
            raise ProtocolError(f"mode must be 'manual' or 'autopilot': {line!r}")
        return ModeMsg(value=value)
    if kind == "goal":
        return GoalMsg(value=_triple(obj, "value", line))
    if kind == "reset":
        return ResetMsg()
    raise ProtocolError(f"unknown message type {kind!r}: {line!r}")


class _Client:
    """One connection: reader thread feeding the server, writer thread
    draining a bounded outbound queue (oldest lines dropped on overflow)."""

    def __init__(self, sock: socket.socket, addr, websocket: bool):
        self.sock = sock
        self.addr = addr
        self.websocket = websocket
        self.outbound: collections.deque[str] = collections.deque(maxlen=256)
        self.wakeup = threading.Condition()
        self.alive = True

    def queue_line(self, line: str):
        with self.wakeup:
            self.outbound.append(line)
            self.wakeup.notify()

    def close(self):
        self.alive = False
        with self.wakeup:
            self.wakeup.notify()
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


def _ws_accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _WS_GUID).encode()).digest()
    return base64.b64encode(digest).decode()


def _ws_encode_frame(payload: bytes) -> bytes:
    length = len(payload)
    if length < 126:
        header = struct.pack("!BB", 0x81, length)
    elif length < 65536:
        header = struct.pack("!BBH", 0x81, 126, length)
    else:
        header = struct.pack("!BBQ", 0x81, 127, length)
    return header + payload


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    chunks = b""
    while len(chunks) < n:
        part = sock.recv(n - len(chunks))
        if not part:
            raise ConnectionError("socket closed")
        chunks += part
    return chunks


class BridgeServer:
    """Paced simulation server; see the module docstring for the protocol."""

    def __init__(self, config: ScenarioConfig, port: int = 0, host: str = "127.0.0.1"):
        self.config = config
        self.host = host
        self._requested_port = port
        self.core = SimCore(config)
        self.log = TrajectoryLog()
        self.trace = CommandTrace()
        self._inbox: queue.Queue = queue.Queue(maxsize=256)
        self._clients: list[_Client] = []
        self._clients_lock = threading.Lock()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._listener: socket.socket | None = None
        self.port: int | None = None

    # -- lifecycle -----------------------------------------------------------

    def start(self):
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self.host, self._requested_port))
        listener.listen(8)
        self._listener = listener
        self.port = listener.getsockname()[1]
        for target in (self._accept_loop, self._sim_loop):
            thread = threading.Thread(target=target, daemon=True, name=target.__name__)
            thread.start()
            self._threads.append(thread)

    def stop(self):
        self._stop.set()
        if self._listener is not None:
            self._listener.close()
        with self._clients_lock:
            clients = list(self._clients)
        for client in clients:
            client.close()
        for thread in self._threads:
            thread.join(timeout=2.0)

    # -- client handling -----------------------------------------------------

    def _accept_loop(self):
        assert self._listener is not None
        while not self._stop.is_set():
            try:
                sock, addr = self._listener.accept()
            except OSError:
                return  # listener closed
            threading.Thread(
                target=self._client_session, args=(sock, addr), daemon=True
            ).start()

    def _sniff(self, sock: socket.socket) -> bytes | None:
        """First bytes of a connection, or b"" for a silent (raw) client.

        A WebSocket client speaks first (its HTTP upgrade), so a short silence
        means a raw newline-JSON client that is only listening.
        """
        deadline = time.monotonic() + 0.3
        data = b""
        while len(data) < 4:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return data
            sock.settimeout(remaining)
            try:
                chunk = sock.recv(4096)
            except (TimeoutError, socket.timeout):
                return data
            finally:
                sock.settimeout(None)
            if not chunk:
                return data if data else None
            data += chunk
        return data

    def _client_session(self, sock: socket.socket, addr):
        try:
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            first = self._sniff(sock)
            if first is None:
                sock.close()
                return
            websocket = first.startswith(b"GET ")
            leftover = b""
            if websocket:
                leftover = self._ws_handshake(sock, first)
                if leftover is None:
                    sock.close()
                    return
            client = _Client(sock, addr, websocket)
            with self._clients_lock:
                self._clients.append(client)
            writer = threading.Thread(target=self._writer_loop, args=(client,), daemon=True)
            writer.start()
            client.queue_line(encode(HelloMsg(PROTOCOL_VERSION, self.config.name)))
            initial = b"" if websocket else first
            self._reader_loop(client, initial + leftover)
        except (OSError, ConnectionError):
            pass
        finally:
            self._drop_client_socket(sock)

    def _ws_handshake(self, sock: socket.socket, first: bytes):
        data = first
        while b"\r\n\r\n" not in data:
            chunk = sock.recv(4096)
            if not chunk:
                return None
            data += chunk
        header_blob, _, leftover = data.partition(b"\r\n\r\n")
        key = None
        for line in header_blob.split(b"\r\n")[1:]:
            name, _, value = line.partition(b":")
            if name.strip().lower() == b"sec-websocket-key":
                key = value.strip().decode()
        if key is None:
            sock.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            return None
        response = (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {_ws_accept_key(key)}\r\n\r\n"
        )
        sock.sendall(response.encode())
        return leftover

    def _writer_loop(self, client: _Client):
        try:
            while client.alive and not self._stop.is_set():
                with client.wakeup:
                    while not client.outbound and client.alive and not self._stop.is_set():
                        client.wakeup.wait(timeout=0.5)
                    lines = list(client.outbound)
                    client.outbound.clear()
                if not client.alive:
                    return
                for line in lines:
                    payload = (line + "\n").encode()
                    if client.websocket:
                        client.sock.sendall(_ws_encode_frame(payload))
                    else:
                        client.sock.sendall(payload)
        except (OSError, ConnectionError):
            pass
        finally:
            self._drop_client_socket(client.sock)

    def _reader_loop(self, client: _Client, initial: bytes):
        buffer = b""
        if client.websocket:
            self._ws_reader(client, initial)
            return
        buffer = initial
        while client.alive and not self._stop.is_set():
            *lines, buffer = buffer.split(b"\n")
            for raw in lines:
                self._handle_line(raw.decode(errors="replace").strip())
            chunk = client.sock.recv(4096)
            if not chunk:
                return
            buffer += chunk

    def _ws_reader(self, client: _Client, initial: bytes):
        pending = initial
        text = b""

        def read(n: int) -> bytes:
            nonlocal pending
            if len(pending) >= n:
                out, pending = pending[:n], pending[n:]
                return out
            out, pending = pending, b""
            return out + _recv_exact(client.sock, n - len(out))

        while client.alive and not self._stop.is_set():
            b1, b2 = read(2)
            opcode = b1 & 0x0F
            length = b2 & 0x7F
            if length == 126:
                (length,) = struct.unpack("!H", read(2))
            elif length == 127:
                (length,) = struct.unpack("!Q", read(8))
            mask = read(4) if b2 & 0x80 else b""
            payload = read(length)
            if mask:
                payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
            if opcode == 0x8:  # close
                return
            if opcode == 0x9:  # ping -> pong
                frame = struct.pack("!BB", 0x8A, len(payload)) + payload
                client.sock.sendall(frame)
                continue
            if opcode in (0x1, 0x0):  # text or continuation
                text += payload
                if b1 & 0x80:  # FIN
                    for raw in text.decode(errors="replace").split("\n"):
                        self._handle_line(raw.strip())
                    text = b""

    def _handle_line(self, line: str):
        if not line:
            return
        try:
            msg = decode(line)
        except ProtocolError as exc:
            log.warning("ignoring message: %s", exc)
            return
        if isinstance(msg, (CmdMsg, ModeMsg, GoalMsg, ResetMsg)):
            try:
                self._inbox.put_nowait(msg)
            except queue.Full:
                try:
                    self._inbox.get_nowait()  # latest command wins
                except queue.Empty:
                    pass
                self._inbox.put_nowait(msg)
        else:
            log.warning("ignoring unexpected %s from client", type(msg).__name__)

    def _drop_client_socket(self, sock: socket.socket):
        with self._clients_lock:
            for client in list(self._clients):
                if client.sock is sock:
                    self._clients.remove(client)
                    client.close()

    # -- simulation ----------------------------------------------------------

    def _drain_inbox(self):
        before = self.core.held_input
        while True:
            try:
                msg = self._inbox.get_nowait()
            except queue.Empty:
                break
            if isinstance(msg, CmdMsg):
                self.core.set_manual_input(
                    ManualInput(surge=msg.surge, heave=msg.heave, yaw=msg.yaw, roll=msg.roll)
                )
            elif isinstance(msg, ModeMsg):
                self.core.set_mode(msg.value)
            elif isinstance(msg, GoalMsg):
                self.core.set_goal(np.array(msg.value))
            elif isinstance(msg, ResetMsg):
                self.core.reset()
                self.log = TrajectoryLog()
                self.trace = CommandTrace()
                self._emit_from = 0.0
        after = self.core.held_input
        if after != before:
            self.trace.append(self.core.state.time, after)

    def _sim_loop(self):
        dt = self.config.dt
        emit_interval = 1.0 / STATE_RATE_HZ
        max_burst = max(1, int(0.25 / dt))
        self._emit_from = 0.0
        start = time.monotonic()
        steps = 0
        while not self._stop.is_set():
            now = time.monotonic()
            behind = int((now - start) / dt) - steps
            if behind <= 0:
                wait = start + (steps + 1) * dt - now
                time.sleep(min(max(wait, 0.0002), dt))
                continue
            if behind > max_burst:
                start += (behind - max_burst) * dt  # forgive lag beyond the burst cap
                behind = max_burst
            for _ in range(behind):
                self._drain_inbox()
                try:
                    rec = self.core.advance()
                except Exception:
                    log.exception("simulation aborted; bridge stops stepping")
                    return
                self.log.append(rec.state, rec.cmd, rec.wind, rec.contact)
                steps += 1
                if rec.state.time + 1e-12 >= self._emit_from:
                    self._broadcast(rec)
                    self._emit_from += emit_interval
                    if self._emit_from < rec.state.time:  # resync after reset/lag
                        self._emit_from = rec.state.time + emit_interval

    def _broadcast(self, rec: StepRecord):
        state = rec.state
        att = state.attitude
        cmd: ActuatorCommand = rec.cmd
        msg = StateMsg(
            t=state.time,
            position=tuple(float(v) for v in state.position),
            velocity=tuple(float(v) for v in state.velocity),
            attitude=(att.phi, att.theta, att.psi),
            angular_velocity=tuple(float(v) for v in state.angular_velocity),
            command=(cmd.f1, cmd.f2, cmd.theta1, cmd.theta2),
            wind=tuple(float(v) for v in rec.wind),
            mode=self.core.mode,
            contact=rec.contact,
        )
        line = encode(msg)
        with self._clients_lock:
            clients = list(self._clients)
        for client in clients:
            client.queue_line(line)


def serve(
    config: ScenarioConfig,
    port: int,
    log_path: str | None = None,
    record_path: str | None = None,
):
    """Run the bridge until interrupted; optionally write the session log and
    the received command trace on shutdown (SIGINT/SIGTERM both stop it)."""
    server = BridgeServer(config, port=port)
    server.start()
    print(f"serving scenario '{config.name}' on {server.host}:{server.port}", flush=True)

    def _terminate(_signum, _frame):
        raise KeyboardInterrupt

    try:
        signal.signal(signal.SIGTERM, _terminate)
    except ValueError:
        pass  # not the main thread; SIGTERM keeps its default
    try:
        while True:
            time.sleep(0.2)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
        if log_path:
            server.log.write_csv(log_path)
        if record_path:
            server.trace.write_csv(record_path)
