// Panel wiring: DOM controls, keyboard driving, render loop.

import { drawAttitudeDial, drawStripChart } from "./charts.js";
import { Controller, DriveAction } from "./controls.js";
import { StationGateway } from "./gateway.js";
import { UiModel } from "./model.js";

const params = new URLSearchParams(location.search);
const url = params.get("station") ?? `ws://${location.hostname || "127.0.0.1"}:7071`;

const model = new UiModel();
const gateway = new StationGateway(url, {
  onMessage: (msg) => model.apply(msg, performance.now()),
  onOpen: () => {
    model.socketOpen = true;
  },
  onClose: () => {
    model.socketOpen = false;
    model.connected = false;
    model.verified = false;
  },
});
const controller = new Controller(
  { send: (msg) => void gateway.send(msg) },
  () => model.controlsEnabled(),
);

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

const statusBadge = byId<HTMLSpanElement>("status");
const staleBadge = byId<HTMLSpanElement>("stale");
const hintLine = byId<HTMLDivElement>("hint");
const benchLine = byId<HTMLDivElement>("bench");
const pwmCells = [0, 1, 2, 3].map((i) => byId<HTMLTableCellElement>(`pwm${i}`));
const positionChart = byId<HTMLCanvasElement>("position-chart");
const adcChart = byId<HTMLCanvasElement>("adc-chart");
const attitudeDial = byId<HTMLCanvasElement>("attitude-dial");
const throttleSlider = byId<HTMLInputElement>("throttle");
const throttleValue = byId<HTMLSpanElement>("throttle-value");

const actionButtons: [string, DriveAction][] = [
  ["btn-forward", { kind: "forward" }],
  ["btn-backward", { kind: "backward" }],
  ["btn-enable", { kind: "enable" }],
  ["btn-disable", { kind: "disable" }],
  ["btn-latency", { kind: "latency_test" }],
];
for (const [id, action] of actionButtons) {
  byId<HTMLButtonElement>(id).addEventListener("click", () => controller.drive(action));
}

throttleSlider.addEventListener("input", () => {
  const permille = Number(throttleSlider.value) * 10;
  throttleValue.textContent = `${throttleSlider.value}%`;
  controller.drive({ kind: "throttle", permille });
});

// Keyboard: arrows drive while held, space is the disable failsafe.
const keyActions: Record<string, DriveAction> = {
  ArrowUp: { kind: "forward" },
  ArrowDown: { kind: "backward" },
};
document.addEventListener("keydown", (ev) => {
  if (ev.repeat) {
    return;
  }
  if (ev.code === "Space") {
    controller.drive({ kind: "disable" });
    ev.preventDefault();
    return;
  }
  const action = keyActions[ev.key];
  if (action) {
    controller.drive(action);
    ev.preventDefault();
  }
});
document.addEventListener("keyup", (ev) => {
  if (ev.key in keyActions) {
    controller.drive({ kind: "disable" });
    ev.preventDefault();
  }
});

const RENDER_INTERVAL_MS = 50; // <= 20 Hz
let lastRender = 0;

function render(now: number): void {
  requestAnimationFrame(render);
  if (now - lastRender < RENDER_INTERVAL_MS) {
    return;
  }
  lastRender = now;

  let status = "disconnected";
  let cls = "bad";
  if (model.socketOpen && model.verified) {
    status = "verified";
    cls = "good";
  } else if (model.socketOpen && model.connected) {
    status = "connected (verifying)";
    cls = "warn";
  } else if (model.socketOpen) {
    status = "waiting for robot";
    cls = "warn";
  }
  statusBadge.textContent = status;
  statusBadge.className = `badge ${cls}`;

  const stale = model.telemetryStale(now);
  staleBadge.textContent = stale ? "telemetry stale" : "telemetry live";
  staleBadge.className = `badge ${stale ? "warn" : "good"}`;

  const enabled = model.controlsEnabled();
  for (const [id] of actionButtons) {
    byId<HTMLButtonElement>(id).disabled = !enabled;
  }
  throttleSlider.disabled = !enabled;

  hintLine.textContent = controller.hint ?? model.lastError ?? "";
  model.pwm.forEach((v, i) => {
    pwmCells[i].textContent = String(v);
  });
  if (model.lastBench) {
    const b = model.lastBench;
    benchLine.textContent =
      `link RTT ${b.latency_ms.toFixed(2)} ms (σ ${b.latency_std_ms.toFixed(2)} ms, ` +
      `${b.received}/${b.sent} echoed, ${b.lost} lost)`;
  }

  drawStripChart(positionChart, [
    { data: model.carPosition, color: "#6cf", label: "position (m)" },
  ]);
  const adcSeries = [...model.adc.entries()].map(([ch, data], i) => ({
    data,
    color: ["#fc6", "#6fc", "#f6c", "#c6f"][i % 4],
    label: `ch${ch}`,
  }));
  drawStripChart(adcChart, adcSeries);
  const roll = model.roll.latest()?.value ?? 0;
  const pitch = model.pitch.latest()?.value ?? 0;
  drawAttitudeDial(attitudeDial, roll, pitch);
}

gateway.connect();
requestAnimationFrame(render);
