// Small canvas renderers: strip chart for time series, dial for attitude.

import { Series } from "./model.js";

export function drawStripChart(
  canvas: HTMLCanvasElement,
  series: { data: Series; color: string; label: string }[],
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#333";
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);

  let min = Infinity;
  let max = -Infinity;
  let tMin = Infinity;
  let tMax = -Infinity;
  for (const { data } of series) {
    for (const p of data.points) {
      min = Math.min(min, p.value);
      max = Math.max(max, p.value);
      tMin = Math.min(tMin, p.tNs);
      tMax = Math.max(tMax, p.tNs);
    }
  }
  if (!isFinite(min)) {
    return;
  }
  if (max - min < 1e-9) {
    max = min + 1;
  }
  if (tMax - tMin < 1) {
    tMax = tMin + 1;
  }

  let labelX = 6;
  for (const { data, color, label } of series) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    data.points.forEach((p, i) => {
      const x = ((p.tNs - tMin) / (tMax - tMin)) * (width - 8) + 4;
      const y = height - 4 - ((p.value - min) / (max - min)) * (height - 8);
      if (i === 0) {
        ctx.moveTo(x, y);
      } else {
        ctx.lineTo(x, y);
      }
    });
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.fillText(label, labelX, 12);
    labelX += ctx.measureText(label).width + 12;
  }
  ctx.fillStyle = "#888";
  ctx.fillText(max.toPrecision(3), width - 44, 12);
  ctx.fillText(min.toPrecision(3), width - 44, height - 4);
}

export function drawAttitudeDial(
  canvas: HTMLCanvasElement,
  rollRad: number,
  pitchRad: number,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  const { width, height } = canvas;
  const cx = width / 2;
  const cy = height / 2;
  const r = Math.min(cx, cy) - 6;
  ctx.clearRect(0, 0, width, height);

  ctx.strokeStyle = "#555";
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.stroke();

  // Horizon line rotated by roll, shifted by pitch.
  const pitchShift = Math.max(-r, Math.min(r, (pitchRad / (Math.PI / 4)) * r));
  ctx.save();
  ctx.translate(cx, cy + pitchShift);
  ctx.rotate(-rollRad);
  ctx.strokeStyle = "#6cf";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(-r, 0);
  ctx.lineTo(r, 0);
  ctx.stroke();
  ctx.restore();

  ctx.fillStyle = "#aaa";
  ctx.fillText(`roll ${(rollRad * 57.2958).toFixed(1)}°`, 6, height - 18);
  ctx.fillText(`pitch ${(pitchRad * 57.2958).toFixed(1)}°`, 6, height - 6);
}
