import init, { bergerSweep, s3ActionPsi, projectionPsi, pathCurve, kappa3Heatmap } from "./pkg/invariant_curvature_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function pairs(flat) {
  const out = [];
  for (let i = 0; i < flat.length; i += 2) out.push([flat[i], flat[i + 1]]);
  return out;
}

function linePlot(canvas, points, marker) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const xs = points.map((p) => p[0]);
  const ys = points.map((p) => p[1]).concat([0]);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const pad = 30;
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, sy(0));
  ctx.lineTo(w - pad, sy(0));
  ctx.stroke();
  if (marker !== undefined && marker >= x0 && marker <= x1) {
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(sx(marker), pad);
    ctx.lineTo(sx(marker), h - pad);
    ctx.stroke();
    ctx.setLineDash([]);
  }
  ctx.strokeStyle = "#1f5fa8";
  ctx.beginPath();
  points.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.fillText(`${x0.toFixed(3)}`, pad, h - 8);
  ctx.fillText(`${x1.toFixed(3)}`, w - pad - 30, h - 8);
  ctx.fillText(`min ${Math.min(...points.map((p) => p[1])).toExponential(3)}`, pad, 14);
}

function heatmap(canvas, values, n) {
  const ctx = canvas.getContext("2d");
  const cell = canvas.width / n;
  const scale = Math.max(...values.map(Math.abs)) || 1;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v = values[i * n + j] / scale;
      const c = Math.round(255 * (1 - Math.abs(v)));
      ctx.fillStyle = v < 0 ? `rgb(${c},${c},255)` : `rgb(255,${c},${c})`;
      ctx.fillRect(j * cell, i * cell, cell + 1, cell + 1);
    }
  }
}

function s3Psi() {
  return s3ActionPsi(num("p-alpha"), num("p-beta"), num("p-l1"), num("p-l2"), num("p-l3"));
}

function guarded(statusId, f) {
  return () => {
    const status = $(statusId);
    status.className = "status";
    status.textContent = "running…";
    setTimeout(() => {
      const start = performance.now();
      try {
        const note = f();
        const ms = `${(performance.now() - start).toFixed(0)} ms`;
        status.textContent = note ? `${note} (${ms})` : ms;
      } catch (e) {
        status.className = "error";
        status.textContent = String(e.message ?? e);
      }
    }, 0);
  };
}

await init();

$("b-run").onclick = guarded("b-status", () => {
  const out = bergerSweep(num("b-min"), num("b-max"), num("b-steps"), num("b-samples"), 1);
  linePlot($("b-plot"), pairs(out), 4 / 3);
});

$("p-run").onclick = guarded("p-status", () => {
  linePlot($("p-plot"), pairs(pathCurve(s3Psi(), 12, 1024, 1)));
});

$("h-run").onclick = guarded("h-status", () => {
  const presets = {
    "enlarge-diagonal": () => projectionPsi("diagonal", 1),
    "shrink-diagonal": () => projectionPsi("diagonal", -1),
    "enlarge-first": () => projectionPsi("first", 1),
    "s3-action": s3Psi,
  };
  const n = num("h-n");
  const values = kappa3Heatmap(presets[$("h-psi").value](), n);
  heatmap($("h-plot"), values, n);
  return `min κ‴(0) on grid ${Math.min(...values).toFixed(6)}`;
});
