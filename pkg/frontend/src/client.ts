/**
 * Cockpit client: owns the connection lifecycle and the 30 Hz command loop.
 *
 * Input axes are sampled and sent at a fixed rate regardless of the display
 * rate, mirroring the bridge's state rate. The client never simulates
 * anything; closing and reopening it cannot change simulation outcomes
 * beyond the commands the pilot actually sent.
 */

import { Axes, SEND_RATE_HZ, ZERO_AXES, axesEqual } from "./axes.js";
import {
  CockpitState,
  initialCockpitState,
  onConnecting,
  onDisconnected,
  onHello,
  onState,
  setAxes,
  setGoal,
} from "./cockpit.js";
import { Message, ProtocolError, Vec3, decode, encode } from "./protocol.js";
import { LineTransport, connectTransport } from "./transport.js";

const RETRY_BASE_MS = 500;
const RETRY_MAX_MS = 4000;

export class CockpitClient {
  readonly state: CockpitState = initialCockpitState();
  private transport: LineTransport | null = null;
  private sendTimer: ReturnType<typeof setInterval> | null = null;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private retryDelay = RETRY_BASE_MS;
  private stopped = true;
  private lastSent: Axes | null = null;

  constructor(
    private readonly url: string,
    private readonly connector: (url: string) => Promise<LineTransport> = connectTransport,
  ) {}

  /** Connect (and keep retrying with backoff until stop()). */
  start(): void {
    this.stopped = false;
    void this.connectOnce();
  }

  stop(): void {
    this.stopped = true;
    if (this.retryTimer) clearTimeout(this.retryTimer);
    this.stopSending();
    this.transport?.close();
    this.transport = null;
    onDisconnected(this.state);
  }

  private async connectOnce(): Promise<void> {
    if (this.stopped) return;
    onConnecting(this.state);
    let transport: LineTransport;
    try {
      transport = await this.connector(this.url);
    } catch {
      this.scheduleRetry();
      return;
    }
    this.transport = transport;
    transport.onOpen(() => {
      this.retryDelay = RETRY_BASE_MS;
      this.startSending();
    });
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => {
      this.stopSending();
      onDisconnected(this.state);
      this.scheduleRetry();
    });
  }

  private scheduleRetry(): void {
    if (this.stopped) return;
    this.retryTimer = setTimeout(() => void this.connectOnce(), this.retryDelay);
    this.retryDelay = Math.min(this.retryDelay * 2, RETRY_MAX_MS);
  }

  private handleLine(line: string): void {
    let msg: Message;
    try {
      msg = decode(line);
    } catch (err) {
      if (err instanceof ProtocolError) {
        this.state.warnings.push(err.message);
        return;
      }
      throw err;
    }
    if (msg.type === "hello") {
      onHello(this.state, msg);
    } else if (msg.type === "state") {
      onState(this.state, msg);
    }
    // cmd/mode/goal/reset are client-to-server; a server echo is ignored
  }

  /** Update the input axes; they are sent on the next 30 Hz tick. */
  setInputAxes(axes: Axes): void {
    setAxes(this.state, axes);
  }

  private startSending(): void {
    this.stopSending();
    this.lastSent = null;
    this.sendTimer = setInterval(() => this.tickSend(), 1000 / SEND_RATE_HZ);
  }

  private stopSending(): void {
    if (this.sendTimer) {
      clearInterval(this.sendTimer);
      this.sendTimer = null;
    }
  }

  /** One command-loop tick (exposed for tests driving a fake clock). */
  tickSend(): void {
    if (!this.transport) return;
    const axes = this.state.axes;
    // keep the wire quiet while centered and nothing changed
    if (this.lastSent !== null && axesEqual(axes, this.lastSent) && axesEqual(axes, ZERO_AXES)) {
      return;
    }
    this.transport.send(
      encode({ type: "cmd", surge: axes.surge, heave: axes.heave, yaw: axes.yaw, roll: axes.roll }),
    );
    this.lastSent = { ...axes };
  }

  requestMode(value: "manual" | "autopilot"): void {
    this.transport?.send(encode({ type: "mode", value }));
  }

  sendGoal(goal: Vec3): void {
    setGoal(this.state, goal);
    this.transport?.send(encode({ type: "goal", value: goal }));
  }

  sendReset(): void {
    this.transport?.send(encode({ type: "reset" }));
  }
}
