import init, { defaultConfig, positionCurve, optimizePosition, compareModels } from "./pkg/pa_aoi_wasm.js";

const $ = (id) => document.getElementById(id);
let base;

function scenario() {
  const cfg = structuredClone(base);
  cfg.devices = [{ x_m: +$("xu").value, y_m: +$("yu").value, weight: 1 }];
  cfg.rf.blockage_beta = 10 ** +$("beta").value;
  cfg.energy.capacitor_j = 2 ** +$("bmax").value;
  return JSON.stringify(cfg);
}

function showInputs() {
  $("xu-out").value = `${$("xu").value} m`;
  $("yu-out").value = `${$("yu").value} m`;
  $("beta-out").value = (10 ** +$("beta").value).toExponential(1);
  $("bmax-out").value = `2^${$("bmax").value} J`;
  $("xp-out").value = `${$("xp").value} m`;
  $("cycles-out").value = (10 ** +$("cycles").value).toLocaleString();
}

const fmt = (v) => (v === "inf" ? "inf" : Number(v).toPrecision(6));

function drawCurve(points) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 50;
  ctx.clearRect(0, 0, w, h);
  const xs = points.map((p) => p.x_p_m);
  const finite = points.flatMap((p) => [p.aoi_paper_s, p.aoi_corrected_s]).filter((v) => v !== "inf");
  const xMax = xs[xs.length - 1];
  const sx = (x) => pad + (x / xMax) * (w - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad / 2, w - 2 * pad, h - 1.5 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText("antenna position x_p (m)", w / 2 - 60, h - 8);
  for (let t = 0; t <= 5; t++) {
    const x = (xMax * t) / 5;
    ctx.fillText(x.toFixed(0), sx(x) - 6, h - pad + 16);
  }
  if (finite.length === 0) {
    ctx.fillText("no feasible position: every age is infinite", w / 2 - 110, h / 2);
    return;
  }
  const lo = Math.log10(Math.min(...finite)), hi = Math.log10(Math.max(...finite));
  const span = Math.max(hi - lo, 1e-9);
  const sy = (v) => h - pad - ((Math.log10(v) - lo) / span) * (h - 2 * pad);
  const py = (p) => h - pad - p * (h - 2 * pad);
  ctx.fillText(`${(10 ** hi).toPrecision(3)} s`, 4, sy(10 ** hi) + 4);
  ctx.fillText(`${(10 ** lo).toPrecision(3)} s`, 4, sy(10 ** lo) + 4);
  ctx.fillText("1", w - pad + 6, py(1) + 4);
  ctx.fillText("0", w - pad + 6, py(0) + 4);

  const line = (color, ys) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    let open = false;
    points.forEach((p, i) => {
      const y = ys(p);
      if (y === null) { open = false; return; }
      if (open) ctx.lineTo(sx(xs[i]), y); else ctx.moveTo(sx(xs[i]), y);
      open = true;
    });
    ctx.stroke();
  };
  line("#ff7f0e", (p) => (p.aoi_paper_s === "inf" ? null : sy(p.aoi_paper_s)));
  line("#1f77b4", (p) => (p.aoi_corrected_s === "inf" ? null : sy(p.aoi_corrected_s)));
  line("#2ca02c", (p) => py(p.success_prob));
}

function guarded(fn) {
  try {
    $("status").textContent = "";
    $("status").className = "";
    fn();
  } catch (e) {
    $("status").textContent = String(e.message ?? e);
    $("status").className = "error";
  }
}

function refresh() {
  showInputs();
  guarded(() => drawCurve(JSON.parse(positionCurve(scenario(), 141))));
}

function optimize() {
  guarded(() => {
    const r = JSON.parse(optimizePosition(scenario(), "single", 0.1, 0));
    $("opt-out").textContent =
      `optimal x_p*        ${fmt(r.x_p_star_m)} m\n` +
      `average age at x_p* ${fmt(r.aoi_star_s)} s\n` +
      `average age at x=0  ${fmt(r.aoi_fixed_s)} s\n` +
      `fixed / optimal     ${fmt(r.baseline_ratio)}`;
  });
}

function simulate() {
  guarded(() => {
    const cycles = 10 ** +$("cycles").value;
    const r = JSON.parse(compareModels(scenario(), +$("xp").value, cycles, 1));
    const v = r.variant_values, s = r.sim;
    $("sim-out").textContent =
      `charge slots K      ${v.charge_slots}\n` +
      `delivery prob p_s   ${fmt(v.success_prob)}   simulated ${fmt(s.p_s_hat)}\n` +
      `E[S^2] corrected    ${fmt(v.e_s2_corrected)}\n` +
      `E[S^2] paper        ${fmt(v.e_s2_paper)}\n` +
      `E[S^2] simulated    ${fmt(s.e_s2_hat)} ± ${fmt(1.959964 * s.e_s2_se)}\n` +
      `age corrected       ${fmt(v.aoi_corrected_s)} s\n` +
      `age paper           ${fmt(v.aoi_paper_s)} s\n` +
      `age simulated       ${fmt(s.avg_aoi_s)} ± ${fmt(s.ci_halfwidth_s)} s\n` +
      `verdict             ${r.verdict}`;
  });
}

await init();
base = JSON.parse(defaultConfig());
for (const id of ["xu", "yu", "beta", "bmax"]) $(id).addEventListener("input", refresh);
for (const id of ["xp", "cycles"]) $(id).addEventListener("input", showInputs);
$("optimize").addEventListener("click", optimize);
$("simulate").addEventListener("click", simulate);
refresh();
