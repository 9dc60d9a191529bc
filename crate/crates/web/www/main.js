import init, { beamProfile, fieldSlice, tiltScan, directivity } from "./pkg/holobeam_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function axes(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(40.5, 10.5, w - 50, h - 40);
}

function plot(canvas, series, xRange, yMax, xLabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  axes(ctx, w, h);
  const px = (x) => 40 + ((x - xRange[0]) / (xRange[1] - xRange[0])) * (w - 50);
  const py = (y) => h - 30 - (y / yMax) * (h - 40);
  for (const { xs, ys, color } of series) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let pen = false;
    xs.forEach((x, i) => {
      if (!Number.isFinite(ys[i])) { pen = false; return; }
      pen ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]));
      pen = true;
    });
    ctx.stroke();
  }
  ctx.fillStyle = "#333";
  ctx.fillText(xRange[0].toFixed(2), 40, h - 12);
  ctx.fillText(xRange[1].toFixed(2), w - 40, h - 12);
  ctx.fillText(xLabel, w / 2, h - 12);
  ctx.fillText(yMax.toExponential(2), 2, 18);
}

function drawProfile() {
  const a = num("a"), s = num("s"), r = num("r");
  const theta = (num("theta") * Math.PI) / 180;
  $("thetaOut").textContent = $("theta").value;
  const n = 600, t0 = r - 6 * s, t1 = r + 6 * s;
  const v = beamProfile(a, s, r, theta, t0, t1, n);
  const xs = [], exact = [], far = [];
  for (let k = 0; k < n; k++) {
    xs.push(v[3 * k]);
    exact.push(v[3 * k + 1]);
    far.push(v[3 * k + 2]);
  }
  const yMax = Math.max(...exact.filter(Number.isFinite), ...far.filter(Number.isFinite)) * 1.05;
  plot($("profile"), [
    { xs, ys: exact, color: "#1565c0" },
    { xs, ys: far, color: "#e65100" },
  ], [t0, t1], yMax, "t");
}

function colormap(u) {
  // dark blue -> cyan -> yellow
  const c = Math.max(0, Math.min(1, u));
  return [Math.round(255 * Math.max(0, 2 * c - 1)), Math.round(255 * Math.min(1, 1.6 * c)), Math.round(255 * (0.5 + 0.5 * Math.sin(Math.PI * (0.5 - c))))];
}

function drawSlice() {
  const a = num("a"), s = num("s"), t = num("t"), extent = num("extent");
  $("tOut").textContent = $("t").value;
  const canvas = $("slice");
  const n = canvas.width / 2;
  const v = fieldSlice(a, s, t, extent, n);
  const finite = Array.from(v).filter(Number.isFinite).sort((p, q) => p - q);
  // clip at the 99th percentile so the ring singularity does not wash out the beam
  const hi = finite[Math.floor(0.99 * (finite.length - 1))];
  const lo = hi - 3;
  const img = canvas.getContext("2d").createImageData(n, n);
  for (let iz = 0; iz < n; iz++) {
    for (let ix = 0; ix < n; ix++) {
      const val = v[iz * n + ix];
      const o = 4 * ((n - 1 - iz) * n + ix);
      const [r, g, b] = Number.isFinite(val) ? colormap((val - lo) / (hi - lo)) : [128, 128, 128];
      img.data.set([r, g, b, 255], o);
    }
  }
  const off = new OffscreenCanvas(n, n);
  off.getContext("2d").putImageData(img, 0, 0);
  const ctx = canvas.getContext("2d");
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
}

function drawTilt() {
  const a = num("a"), s = num("s");
  const v = tiltScan(a, s, num("ar"), num("sr"), num("dist"), 181);
  const xs = [], ys = [];
  for (let k = 0; k < v.length / 2; k++) {
    xs.push((v[2 * k] * 180) / Math.PI);
    ys.push(v[2 * k + 1]);
  }
  plot($("tilt"), [{ xs, ys, color: "#2e7d32" }], [0, 180], 1.05, "tilt (deg)");
}

function redraw() {
  try {
    $("err").textContent = "";
    $("dir").textContent = directivity(num("a"), num("s")).toPrecision(6);
    drawProfile();
    drawSlice();
    drawTilt();
  } catch (e) {
    $("err").textContent = String(e.message ?? e);
  }
}

await init();
for (const el of document.querySelectorAll("input")) el.addEventListener("input", redraw);
redraw();
