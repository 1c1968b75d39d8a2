// WebSocket session to the station's UI port with automatic reconnect
// (exponential backoff, capped).  The socket factory is injectable so
// tests can drive the client without a network.

import { ClientMessage, parseServerMessage, ServerMessage } from "./messages.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export interface GatewayCallbacks {
  onMessage?: (msg: ServerMessage) => void;
  onOpen?: () => void;
  onClose?: () => void;
}

const BASE_DELAY_MS = 500;
const MAX_DELAY_MS = 10_000;

export class StationGateway {
  private socket: SocketLike | null = null;
  private attempts = 0;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(
    private readonly url: string,
    private readonly cbs: GatewayCallbacks = {},
    private readonly socketFactory: (url: string) => SocketLike =
      (url) => new WebSocket(url) as unknown as SocketLike,
  ) {}

  get open(): boolean {
    return this.socket !== null && this.attempts === 0;
  }

  connect(): void {
    this.stopped = false;
    let socket: SocketLike;
    try {
      socket = this.socketFactory(this.url);
    } catch (err) {
      console.log("[gateway] connect failed:", err);
      this.scheduleReconnect();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      console.log("[gateway] open", this.url);
      this.cbs.onOpen?.();
    };
    socket.onclose = () => {
      this.socket = null;
      this.cbs.onClose?.();
      this.scheduleReconnect();
    };
    socket.onerror = () => {
      // onclose follows; nothing else to do
    };
    socket.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg) {
        this.cbs.onMessage?.(msg);
      }
    };
  }

  private scheduleReconnect(): void {
    if (this.stopped || this.reconnectTimer !== null) {
      return;
    }
    this.attempts += 1;
    const delay = Math.min(BASE_DELAY_MS * 2 ** (this.attempts - 1), MAX_DELAY_MS);
    console.log(`[gateway] reconnecting in ${delay} ms (attempt ${this.attempts})`);
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      if (!this.stopped) {
        this.connect();
      }
    }, delay);
  }

  send(msg: ClientMessage): boolean {
    if (!this.socket) {
      return false;
    }
    try {
      this.socket.send(JSON.stringify(msg));
      return true;
    } catch {
      return false;
    }
  }

  close(): void {
    this.stopped = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
    this.socket = null;
  }
}
