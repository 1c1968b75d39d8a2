// Gateway JSON schema (mirrors docs/protocol.md in the main repo).

export interface DigitalCommand {
  type: "digital";
  line: number; // 0 = enable, 1 = direction
  value: 0 | 1;
}

export interface PwmCommand {
  type: "pwm";
  values: [number, number, number, number];
}

export interface LatencyTestCommand {
  type: "latency_test";
  rounds: number;
  probes: number;
}

export type ClientMessage = DigitalCommand | PwmCommand | LatencyTestCommand;

export interface StatusMessage {
  type: "status";
  connected: boolean;
  verified: boolean;
}

export interface TelemetryMessage {
  type: "telemetry";
  t_ns: number;
  car_pos_m: number;
  pwm: number[];
  adc: { ch: number; v: number }[];
  attitude: [number, number]; // roll, pitch in radians
}

export interface BenchResultMessage {
  type: "bench_result";
  latency_ms: number;
  latency_std_ms: number;
  sent: number;
  received: number;
  lost: number;
}

export interface ErrorMessage {
  type: "error";
  error: string;
}

export type ServerMessage =
  | StatusMessage
  | TelemetryMessage
  | BenchResultMessage
  | ErrorMessage;

export function parseServerMessage(raw: string): ServerMessage | null {
  try {
    const obj = JSON.parse(raw);
    if (obj && typeof obj.type === "string") {
      return obj as ServerMessage;
    }
  } catch {
    // fall through
  }
  return null;
}
