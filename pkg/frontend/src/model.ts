// Panel state: connection status, telemetry history, benchmark results.
// Telemetry series are bounded ring buffers so memory stays flat no
// matter how long the session runs.

import { BenchResultMessage, ServerMessage, TelemetryMessage } from "./messages.js";

export const MAX_POINTS = 600;
export const STALE_AFTER_MS = 2000;

export interface SeriesPoint {
  tNs: number;
  value: number;
}

export class Series {
  points: SeriesPoint[] = [];

  constructor(readonly maxPoints: number = MAX_POINTS) {}

  push(tNs: number, value: number): void {
    this.points.push({ tNs, value });
    if (this.points.length > this.maxPoints) {
      this.points.splice(0, this.points.length - this.maxPoints);
    }
  }

  get length(): number {
    return this.points.length;
  }

  latest(): SeriesPoint | null {
    return this.points.length ? this.points[this.points.length - 1] : null;
  }
}

export class UiModel {
  socketOpen = false;
  connected = false; // a bridge client is attached to the station
  verified = false;  // ...and passed the handshake
  carPosition = new Series();
  roll = new Series();
  pitch = new Series();
  adc = new Map<number, Series>();
  pwm: number[] = [0, 0, 0, 0];
  lastTelemetryAtMs: number | null = null;
  lastBench: BenchResultMessage | null = null;
  lastError: string | null = null;

  apply(msg: ServerMessage, nowMs: number): void {
    switch (msg.type) {
      case "status":
        this.connected = msg.connected;
        this.verified = msg.verified;
        break;
      case "telemetry":
        this.applyTelemetry(msg, nowMs);
        break;
      case "bench_result":
        this.lastBench = msg;
        break;
      case "error":
        this.lastError = msg.error;
        break;
    }
  }

  private applyTelemetry(msg: TelemetryMessage, nowMs: number): void {
    this.lastTelemetryAtMs = nowMs;
    this.carPosition.push(msg.t_ns, msg.car_pos_m);
    this.roll.push(msg.t_ns, msg.attitude[0]);
    this.pitch.push(msg.t_ns, msg.attitude[1]);
    this.pwm = msg.pwm.slice(0, 4);
    for (const { ch, v } of msg.adc) {
      let series = this.adc.get(ch);
      if (!series) {
        series = new Series();
        this.adc.set(ch, series);
      }
      series.push(msg.t_ns, v);
    }
  }

  controlsEnabled(): boolean {
    return this.socketOpen && this.verified;
  }

  telemetryStale(nowMs: number): boolean {
    if (this.lastTelemetryAtMs === null) {
      return true;
    }
    return nowMs - this.lastTelemetryAtMs > STALE_AFTER_MS;
  }
}
