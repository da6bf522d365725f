/**
 * Line transports: the bridge speaks newline-delimited JSON either over a
 * WebSocket (browser) or a raw TCP socket (tests, tooling). Both surfaces
 * deliver complete lines and accept lines to send.
 */

export interface LineTransport {
  send(line: string): void;
  close(): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  onOpen(handler: () => void): void;
}

class Handlers {
  line: Array<(line: string) => void> = [];
  close: Array<() => void> = [];
  open: Array<() => void> = [];
}

function splitFeed(buffer: { rest: string }, chunk: string, emit: (line: string) => void) {
  buffer.rest += chunk;
  for (;;) {
    const idx = buffer.rest.indexOf("\n");
    if (idx < 0) break;
    const line = buffer.rest.slice(0, idx).trim();
    buffer.rest = buffer.rest.slice(idx + 1);
    if (line.length > 0) emit(line);
  }
}

export function webSocketTransport(url: string): LineTransport {
  const handlers = new Handlers();
  const buffer = { rest: "" };
  const ws = new WebSocket(url);
  ws.onopen = () => handlers.open.forEach((h) => h());
  ws.onclose = () => handlers.close.forEach((h) => h());
  ws.onerror = () => ws.close();
  ws.onmessage = (event) => {
    const data = typeof event.data === "string" ? event.data : "";
    splitFeed(buffer, data, (line) => handlers.line.forEach((h) => h(line)));
  };
  return {
    send(line: string) {
      if (ws.readyState === WebSocket.OPEN) ws.send(line + "\n");
    },
    close() {
      ws.close();
    },
    onLine(h) {
      handlers.line.push(h);
    },
    onClose(h) {
      handlers.close.push(h);
    },
    onOpen(h) {
      handlers.open.push(h);
    },
  };
}

/** Raw TCP transport (Node only); used by the test suite and CLI tooling. */
export async function tcpTransport(host: string, port: number): Promise<LineTransport> {
  const net = await import("node:net");
  const handlers = new Handlers();
  const buffer = { rest: "" };
  const sock = net.createConnection({ host, port });
  sock.setNoDelay(true);
  sock.on("connect", () => handlers.open.forEach((h) => h()));
  sock.on("data", (chunk: Buffer) => {
    splitFeed(buffer, chunk.toString("utf8"), (line) => handlers.line.forEach((h) => h(line)));
  });
  sock.on("close", () => handlers.close.forEach((h) => h()));
  sock.on("error", () => sock.destroy());
  return {
    send(line: string) {
      if (!sock.destroyed) sock.write(line + "\n");
    },
    close() {
      sock.destroy();
    },
    onLine(h) {
      handlers.line.push(h);
    },
    onClose(h) {
      handlers.close.push(h);
    },
    onOpen(h) {
      handlers.open.push(h);
    },
  };
}

/** Pick a transport from a URL: ws://host:port or tcp://host:port. */
export async function connectTransport(url: string): Promise<LineTransport> {
  if (url.startsWith("ws://") || url.startsWith("wss://")) {
    return webSocketTransport(url);
  }
  if (url.startsWith("tcp://")) {
    const rest = url.slice("tcp://".length);
    const [host, port] = rest.split(":");
    return tcpTransport(host, Number(port));
  }
  throw new Error(`unsupported transport url: ${url}`);
}
