import init, { trajectories, bias_curves, forecast } from "./pkg/tom_web.js";

const COLORS = { sgd: "#888", sgdm: "#8c564b", adagrad: "#9467bd", rmsprop: "#2ca02c", adam: "#1f77b4", amsgrad: "#17becf", tom: "#d62728" };
const $ = (id) => document.getElementById(id);

function legend(el, entries) {
  el.innerHTML = entries.map(([name, color, note]) =>
    `<span style="color:${color}">&#9632; ${name}${note ? " " + note : ""}</span>`).join("");
}

function showError(el, err) {
  el.innerHTML = `<span class="error">${err}</span>`;
}

// Plots series of y-values on shared axes; returns nothing, draws in place.
function lineChart(canvas, xs, series, { logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 44;
  ctx.clearRect(0, 0, w, h);
  const tf = logY ? (v) => Math.log10(Math.max(v, 1e-300)) : (v) => v;
  const all = series.flatMap((s) => s.ys.filter(Number.isFinite).map(tf));
  let [lo, hi] = [Math.min(...all), Math.max(...all)];
  if (hi - lo < 1e-12) { lo -= 1; hi += 1; }
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad + ((tf(y) - lo) / (hi - lo)) * (2 * pad - h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad / 2, w - 2 * pad, h - 1.5 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  for (let i = 0; i <= 4; i++) {
    const v = lo + ((hi - lo) * i) / 4;
    const y = h - pad + ((v - lo) / (hi - lo)) * (2 * pad - h);
    ctx.fillText(logY ? `1e${v.toFixed(1)}` : v.toPrecision(3), 2, y + 4);
  }
  ctx.fillText(String(x0), pad, h - pad + 16);
  ctx.fillText(String(x1), w - pad - 20, h - pad + 16);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash || []);
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    s.ys.forEach((y, i) => {
      const x = s.xs ? s.xs[i] : xs[i];
      i === 0 ? ctx.moveTo(px(x), py(y)) : ctx.lineTo(px(x), py(y));
    });
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function drawPaths() {
  const chosen = [...document.querySelectorAll("#optimizers input:checked")].map((c) => c.value);
  let data;
  try {
    data = JSON.parse(trajectories($("problem").value, chosen.join(","), +$("alpha").value, +$("steps").value, 120));
  } catch (err) {
    return showError($("path-legend"), err);
  }
  const canvas = $("path-canvas");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const [xmin, xmax, ymin, ymax] = data.bounds;
  const n = data.grid_size;
  const hi = Math.max(...data.grid);
  const cw = w / n, ch = h / n;
  for (let r = 0; r < n; r++) {
    for (let c = 0; c < n; c++) {
      const v = 1 - data.grid[r * n + c] / hi;
      ctx.fillStyle = `hsl(45, 70%, ${25 + 70 * v}%)`;
      ctx.fillRect(c * cw, h - (r + 1) * ch, cw + 1, ch + 1);
    }
  }
  const px = (x) => ((x - xmin) / (xmax - xmin)) * w;
  const py = (y) => h - ((y - ymin) / (ymax - ymin)) * h;
  ctx.fillStyle = "#000";
  ctx.beginPath();
  ctx.arc(px(data.minimum[0]), py(data.minimum[1]), 5, 0, 2 * Math.PI);
  ctx.fill();
  for (const p of data.paths) {
    ctx.strokeStyle = COLORS[p.optimizer];
    ctx.lineWidth = 2;
    ctx.beginPath();
    p.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(px(x), py(y)) : ctx.lineTo(px(x), py(y))));
    ctx.stroke();
  }
  legend($("path-legend"), data.paths.map((p) => [
    p.optimizer, COLORS[p.optimizer],
    p.diverged ? "(diverged)" : `final loss ${p.losses[p.losses.length - 1].toExponential(2)}`,
  ]));
}

function drawBias() {
  const [b1, b2] = [+$("beta1").value, +$("beta2").value];
  $("beta1-v").textContent = b1.toFixed(3);
  $("beta2-v").textContent = b2.toFixed(3);
  let c;
  try {
    c = JSON.parse(bias_curves(b1, b2, +$("bias-steps").value));
  } catch (err) {
    return showError($("bias-legend"), err);
  }
  lineChart($("bias-canvas"), c.t, [
    { ys: c.forecast, color: "#d62728" },
    { ys: c.approx, color: "#1f77b4", dash: [6, 4] },
    { ys: c.trend, color: "#2ca02c" },
    { ys: c.gap, color: "#9467bd" },
  ]);
  const worst = Math.max(...c.gap);
  legend($("bias-legend"), [
    ["exact forecast factor", "#d62728"],
    ["1 - (beta1 beta2)^t", "#1f77b4"],
    ["trend factor", "#2ca02c"],
    ["relative gap", "#9467bd", `(max ${worst.toFixed(4)} at t=${c.t[c.gap.indexOf(worst)]})`],
  ]);
}

function drawForecast() {
  let r;
  try {
    r = JSON.parse(forecast($("series").value, $("method").value, +$("s-alpha").value, +$("s-beta").value,
      +$("s-gamma").value, +$("cycle").value, +$("horizon").value));
  } catch (err) {
    return showError($("smooth-legend"), err);
  }
  const n = r.values.length;
  const ts = Array.from({ length: n + r.ahead.length }, (_, i) => i + 1);
  const aheadTs = [n, ...r.ahead.map((_, i) => n + i + 1)];
  lineChart($("smooth-canvas"), ts, [
    { ys: r.values, xs: ts.slice(0, n), color: "#222" },
    { ys: r.fitted, xs: ts.slice(0, n), color: "#1f77b4", dash: [4, 3] },
    { ys: [r.values[n - 1], ...r.ahead], xs: aheadTs, color: "#d62728" },
  ]);
  legend($("smooth-legend"), [["series", "#222"], ["one-step fit", "#1f77b4", `(SSE ${r.sse.toPrecision(4)})`], ["forecast", "#d62728"]]);
}

function sampleSeries() {
  const out = [];
  for (let t = 0; t < 72; t++) {
    out.push((50 + 0.6 * t + 8 * Math.sin((2 * Math.PI * t) / 12) + 2 * Math.sin(7.3 * t)).toFixed(2));
  }
  return out.join(", ");
}

await init();
$("optimizers").innerHTML = Object.keys(COLORS).map((k) =>
  `<label><input type="checkbox" value="${k}" ${["adam", "tom", "rmsprop"].includes(k) ? "checked" : ""}> ${k}</label>`).join(" ");
$("series").value = sampleSeries();
$("run").onclick = drawPaths;
$("problem").onchange = drawPaths;
for (const id of ["beta1", "beta2", "bias-steps"]) $(id).oninput = drawBias;
$("fit").onclick = drawForecast;
$("method").onchange = drawForecast;
drawPaths();
drawBias();
drawForecast();
