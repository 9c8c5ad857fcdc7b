// Build first: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { simulate, reconstruct, truth } from "./pkg/fanbeam_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function draw(canvas, values, cols, rows, lo, hi) {
  canvas.width = cols;
  canvas.height = rows;
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(cols, rows);
  const span = hi > lo ? hi - lo : 1;
  for (let i = 0; i < values.length; i++) {
    const g = Math.round(255 * Math.min(1, Math.max(0, (values[i] - lo) / span)));
    img.data.set([g, g, g, 255], 4 * i);
  }
  ctx.putImageData(img, 0, 0);
}

function range(values) {
  let lo = Infinity, hi = -Infinity;
  for (const v of values) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  return [lo, hi];
}

function run(label, f) {
  const t0 = performance.now();
  try {
    const msg = f();
    $("status").textContent = `${label}: ${(performance.now() - t0).toFixed(0)} ms${msg ? "\n" + msg : ""}`;
  } catch (e) {
    $("status").textContent = `${label} failed: ${e.message ?? e}`;
  }
}

function onSimulate() {
  run("simulate", () => {
    const na = num("n-alpha"), nt = num("n-tau");
    const data = simulate($("phantom").value, num("d"), na, nt);
    const [lo, hi] = range(data);
    draw($("sino"), data, na, nt, 0, hi);
    return `line integrals in [${lo.toFixed(3)}, ${hi.toFixed(3)}]`;
  });
}

function onReconstruct() {
  onSimulate();
  run("reconstruct", () => {
    const grid = num("grid");
    const phantom = $("phantom").value;
    const rebin = document.querySelector("input[name=method]:checked").value === "rebin";
    const ref = truth(phantom, grid);
    const rec = reconstruct(phantom, num("d"), num("n-alpha"), num("n-tau"), rebin, grid,
      num("eps"), $("pole").checked, $("jacobian").checked);
    const [, hi] = range(ref);
    draw($("truth"), ref, grid, grid, 0, hi);
    draw($("recon"), rec, grid, grid, 0, hi);
    let se = 0, n = 0;
    for (let i = 0; i < rec.length; i++) {
      const r = Math.floor(i / grid), c = i % grid;
      const x = -1 + (c + 0.5) * 2 / grid, y = 1 - (r + 0.5) * 2 / grid;
      if (Math.hypot(x, y) < 0.7) { se += (rec[i] - ref[i]) ** 2; n++; }
    }
    return `rmse over r < 0.7: ${Math.sqrt(se / n).toFixed(4)}`;
  });
}

await init();
$("simulate").addEventListener("click", onSimulate);
$("reconstruct").addEventListener("click", onReconstruct);
onReconstruct();
