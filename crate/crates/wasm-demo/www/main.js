import init, { rate_curve, drift_surface, dark_count_map, crossover } from "./pkg/distill_wasm_demo.js";

const $ = (id) => document.getElementById(id);

function plotRates() {
  const tmin = Number($("tmin").value);
  const n = Number($("tpoints").value);
  let v;
  try {
    v = rate_curve(tmin, 1.0, n);
  } catch (e) {
    $("rates-info").textContent = String(e);
    return;
  }
  const c = $("rates-canvas");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const lx = (t) => ((Math.log10(t) - Math.log10(tmin)) / -Math.log10(tmin)) * (c.width - 40) + 30;
  let lo = Infinity, hi = -Infinity;
  for (let i = 0; i < v.length; i += 3) {
    for (const r of [v[i + 1], v[i + 2]]) {
      lo = Math.min(lo, Math.log10(r));
      hi = Math.max(hi, Math.log10(r));
    }
  }
  const ly = (r) => c.height - 20 - ((Math.log10(r) - lo) / (hi - lo)) * (c.height - 40);
  for (const [col, colour] of [[1, "#c33"], [2, "#36c"]]) {
    g.strokeStyle = colour;
    g.beginPath();
    for (let i = 0; i < v.length; i += 3) {
      const f = i === 0 ? "moveTo" : "lineTo";
      g[f](lx(v[i]), ly(v[i + col]));
    }
    g.stroke();
  }
  const ts = crossover();
  g.strokeStyle = "#999";
  g.beginPath();
  g.moveTo(lx(ts), 10);
  g.lineTo(lx(ts), c.height - 10);
  g.stroke();
  $("rates-info").textContent = `red: this scheme, blue: two-photon reference; crossover at T = ${ts.toFixed(4)}`;
}

function plotDrift() {
  const n = 60;
  const v = drift_surface(Number($("dx").value), Number($("dt").value), n);
  const clip = $("clip").checked;
  const c = $("drift-canvas");
  const g = c.getContext("2d");
  const w = c.width / n, h = c.height / n;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const f = v[i * n + j];
      if (clip && f < 1 - 1e-3) {
        g.fillStyle = "#fff";
      } else {
        const s = Math.max(0, Math.min(1, -Math.log10(Math.max(1 - f, 1e-9)) / 6));
        g.fillStyle = `hsl(${220 * s}, 70%, 50%)`;
      }
      g.fillRect(j * w, c.height - (i + 1) * h, w, h);
    }
  }
}

function plotDark() {
  const nt = 30, np = 30;
  const v = dark_count_map(nt, 1e-8, Number($("pmax").value), np);
  const colours = ["#4a4", "#36c", "#aaa"];
  const c = $("dark-canvas");
  const g = c.getContext("2d");
  const w = c.width / nt, h = c.height / np;
  for (let i = 0; i < nt; i++) {
    for (let j = 0; j < np; j++) {
      g.fillStyle = colours[v[i * np + j]];
      g.fillRect(i * w, c.height - (j + 1) * h, w, h);
    }
  }
}

await init();
$("rates").onclick = plotRates;
$("drift").onclick = plotDrift;
$("dark").onclick = plotDark;
plotRates();
plotDrift();
plotDark();
