// Mapping from panel actions to gateway messages.  Every control emits a
// fixed, documented message sequence (snapshot-tested), and nothing is
// sent before the station reports the client as verified.

import { ClientMessage } from "./messages.js";

export type DriveAction =
  | { kind: "enable" }
  | { kind: "disable" }
  | { kind: "forward" }
  | { kind: "backward" }
  | { kind: "throttle"; permille: number }
  | { kind: "latency_test" };

const ENABLE_LINE = 0;
const DIRECTION_LINE = 1;

export function messagesFor(action: DriveAction): ClientMessage[] {
  switch (action.kind) {
    case "enable":
      return [{ type: "digital", line: ENABLE_LINE, value: 1 }];
    case "disable":
      return [{ type: "digital", line: ENABLE_LINE, value: 0 }];
    case "forward":
      // Direction first so the car never moves the wrong way.
      return [
        { type: "digital", line: DIRECTION_LINE, value: 1 },
        { type: "digital", line: ENABLE_LINE, value: 1 },
      ];
    case "backward":
      return [
        { type: "digital", line: DIRECTION_LINE, value: 0 },
        { type: "digital", line: ENABLE_LINE, value: 1 },
      ];
    case "throttle": {
      const v = clampPwm(action.permille);
      return [{ type: "pwm", values: [v, v, v, v] }];
    }
    case "latency_test":
      return [{ type: "latency_test", rounds: 1, probes: 50 }];
  }
}

function clampPwm(value: number): number {
  return Math.max(0, Math.min(1000, Math.round(value)));
}

export interface CommandSink {
  send(msg: ClientMessage): void;
}

/** Gate between the controls and the wire: drops actions (with a hint)
 *  until the station reports the link as verified. */
export class Controller {
  hint: string | null = null;

  constructor(
    private readonly sink: CommandSink,
    private isVerified: () => boolean,
  ) {}

  drive(action: DriveAction): boolean {
    if (!this.isVerified()) {
      this.hint = "robot link not verified yet";
      return false;
    }
    this.hint = null;
    for (const msg of messagesFor(action)) {
      this.sink.send(msg);
    }
    return true;
  }
}
