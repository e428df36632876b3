import init, { strikeCurve, fxProfile, densityCurve } from "./pkg/tzo_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c"];
const num = (id) => parseFloat(document.getElementById(id).value);

// Draws each series against `xs` on a shared linear scale with light axes.
function plot(canvas, xs, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const all = series.flat().filter(Number.isFinite);
  let lo = Math.min(...all), hi = Math.max(...all);
  if (hi - lo < 1e-300) { lo -= 1; hi += 1; }
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - lo) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#bbb";
  ctx.fillStyle = "#555";
  ctx.font = "11px system-ui";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2); ctx.lineTo(pad, h - pad); ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  ctx.fillText(x0.toPrecision(4), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(4), w - pad - 30, h - pad + 14);
  ctx.fillText(hi.toPrecision(3), 2, pad);
  ctx.fillText(lo.toPrecision(3), 2, h - pad);

  series.forEach((ys, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ys.forEach((y, j) => (j ? ctx.lineTo(sx(xs[j]), sy(y)) : ctx.moveTo(sx(xs[j]), sy(y))));
    ctx.stroke();
  });
}

function columns(flat, width) {
  const cols = Array.from({ length: width }, () => []);
  for (let i = 0; i < flat.length; i += width) {
    for (let c = 0; c < width; c++) cols[c].push(flat[i + c]);
  }
  return cols;
}

function guarded(id, draw) {
  const err = document.getElementById(`${id}-err`);
  try {
    draw();
    err.textContent = "";
  } catch (e) {
    err.textContent = e.message ?? String(e);
  }
}

function model() {
  return [document.getElementById("kind").value, num("s_minus"), num("s_plus"), num("sigma"), num("nu")];
}

function rescale(ys) {
  const lo = Math.min(...ys), hi = Math.max(...ys);
  return ys.map((y) => (hi > lo ? (y - lo) / (hi - lo) : 0));
}

function redraw() {
  guarded("prices", () => {
    const [k, call, put, binary] = columns(strikeCurve(...model(), num("spot"), num("tenor"), 101), 5);
    plot(document.getElementById("prices"), k, [call, put, binary.map((b) => 0.1 * b)]);
  });
  guarded("profile", () => {
    const [x, s, p, r] = columns(fxProfile(...model(), 201), 4);
    plot(document.getElementById("profile"), x, [rescale(s), p, rescale(r)]);
  });
  guarded("density", () => {
    const [y, d] = columns(densityCurve(num("d_mu"), num("d_sigma"), num("d_rho"), 1.0, num("d_x"), num("d_tau"), 201), 2);
    plot(document.getElementById("density"), y, [d]);
  });
}

await init();
document.querySelectorAll("input, select").forEach((el) => el.addEventListener("input", redraw));
redraw();
