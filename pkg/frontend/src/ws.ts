// Socket plumbing: connect to /ws, feed StateUpdates into the session
// state, and push validated commands. Reconnects with a short backoff;
// the parameter panel lives in the DOM so it survives reconnects.

import { UiSessionState } from "./state";
import { ErrorPayload, StateUpdate, TeleopCommand } from "./types";
import { assertValidCommand } from "./validate";

export class Connection {
  private ws: WebSocket | null = null;
  private url: string;
  private retryMs = 500;

  constructor(private state: UiSessionState) {
    const proto = location.protocol === "https:" ? "wss:" : "ws:";
    this.url = `${proto}//${location.host}/ws`;
  }

  open(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.state.connected = true;
      this.retryMs = 500;
    };
    this.ws.onmessage = (event: MessageEvent<string>) => {
      const payload = JSON.parse(event.data) as StateUpdate | ErrorPayload;
      if ("error" in payload) {
        this.state.lastError = `${payload.error.field}: ${payload.error.message}`;
        return;
      }
      this.state.ingest(payload, performance.now());
    };
    this.ws.onclose = () => {
      this.state.connected = false;
      setTimeout(() => this.open(), this.retryMs);
      this.retryMs = Math.min(this.retryMs * 2, 5000);
    };
    this.ws.onerror = () => this.ws?.close();
  }

  send(cmd: TeleopCommand): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(assertValidCommand(cmd)));
    }
  }
}
