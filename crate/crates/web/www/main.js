import init, { levelScheme, radialSpectrum, pairing } from "./pkg/susyh_web.js";

const SVG = "http://www.w3.org/2000/svg";
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
const W = 900, H = 360, PAD = 45;

function el(tag, attrs = {}, text) {
  const e = document.createElementNS(SVG, tag);
  for (const [k, v] of Object.entries(attrs)) e.setAttribute(k, v);
  if (text !== undefined) e.textContent = text;
  return e;
}

function scale(lo, hi, a, b) {
  const span = hi - lo || 1;
  return (x) => a + ((x - lo) / span) * (b - a);
}

function axes(svg, xr, yr, xlabel, ylabel) {
  svg.append(el("line", { x1: PAD, y1: H - PAD, x2: W - 10, y2: H - PAD, stroke: "#333" }));
  svg.append(el("line", { x1: PAD, y1: 10, x2: PAD, y2: H - PAD, stroke: "#333" }));
  svg.append(el("text", { x: W / 2, y: H - 8, "text-anchor": "middle" }, xlabel));
  svg.append(el("text", { x: 12, y: H / 2, transform: `rotate(-90 12 ${H / 2})`, "text-anchor": "middle" }, ylabel));
  svg.append(el("text", { x: PAD, y: H - PAD + 15, "text-anchor": "middle", "font-size": 11 }, xr[0].toPrecision(3)));
  svg.append(el("text", { x: W - 10, y: H - PAD + 15, "text-anchor": "end", "font-size": 11 }, xr[1].toPrecision(3)));
  svg.append(el("text", { x: PAD - 4, y: H - PAD, "text-anchor": "end", "font-size": 11 }, yr[0].toPrecision(4)));
  svg.append(el("text", { x: PAD - 4, y: 18, "text-anchor": "end", "font-size": 11 }, yr[1].toPrecision(4)));
}

function newSvg(out) {
  const svg = el("svg", { width: W, height: H, viewBox: `0 0 ${W} ${H}` });
  out.append(svg);
  return svg;
}

function form(id) {
  const root = document.getElementById(id);
  const val = (n) => root.querySelector(`[name=${n}]`).value;
  const out = root.querySelector(".out");
  return { root, val, num: (n) => Number(val(n)), out };
}

function guard(out, fn) {
  out.replaceChildren();
  try {
    fn();
  } catch (e) {
    const p = document.createElement("p");
    p.className = "err";
    p.textContent = String(e.message ?? e);
    out.append(p);
  }
}

function drawScheme() {
  const f = form("scheme");
  guard(f.out, () => {
    const data = JSON.parse(levelScheme(f.num("za"), f.num("dmin"), f.num("dmax"), f.num("nmax")));
    const rows = data.rows;
    const xs = rows.map((r) => r.tanh_D), ys = rows.map((r) => r.E_over_m);
    const xr = [Math.min(...xs), Math.max(...xs)], yr = [Math.min(...ys), Math.max(...ys)];
    const sx = scale(xr[0], xr[1], PAD + 10, W - 20), sy = scale(yr[0], yr[1], H - PAD - 10, 20);
    const svg = newSvg(f.out);
    axes(svg, xr, yr, "tanh D", "E/m");
    const byId = new Map(rows.map((r) => [r.id, r]));
    for (const r of rows) {
      if (r.partner_id === null) continue;
      const p = byId.get(r.partner_id);
      svg.append(el("line", { x1: sx(r.tanh_D), y1: sy(r.E_over_m), x2: sx(p.tanh_D), y2: sy(p.E_over_m), stroke: "#aaa" }));
    }
    for (const r of rows) {
      const c = el("circle", { cx: sx(r.tanh_D), cy: sy(r.E_over_m), r: r.is_ladder_bottom ? 4 : 2.5, fill: COLORS[r.l % COLORS.length] });
      c.append(el("title", {}, `D=${r.D} n=${r.n} l=${r.l} kappa=${r.kappa} E/m=${r.E_over_m.toFixed(8)}`));
      svg.append(c);
    }
    if (data.skipped?.length) {
      const p = document.createElement("p");
      p.textContent = `skipped (kappa² ≤ (Zα)²): ${JSON.stringify(data.skipped)}`;
      f.out.append(p);
    }
  });
}

function drawSpectrum() {
  const f = form("spectrum");
  guard(f.out, () => {
    const data = JSON.parse(radialSpectrum(f.num("dim"), f.num("za"), f.num("l"), f.val("sign"), f.num("levels"), f.num("points")));
    const all = data.levels.flatMap((l) => [...l.curve.large, ...l.curve.small]);
    const rmax = Math.max(...data.levels.flatMap((l) => l.curve.r));
    const yr = [Math.min(...all), Math.max(...all)];
    const sx = scale(0, rmax, PAD, W - 10), sy = scale(yr[0], yr[1], H - PAD, 15);
    const svg = newSvg(f.out);
    axes(svg, [0, rmax], yr, "m r", "F (solid), G (dashed)");
    data.levels.forEach((lvl, i) => {
      const c = COLORS[i % COLORS.length];
      for (const [ys, dash] of [[lvl.curve.large, ""], [lvl.curve.small, "4 3"]]) {
        const pts = lvl.curve.r.map((r, k) => `${sx(r)},${sy(ys[k])}`).join(" ");
        svg.append(el("polyline", { points: pts, fill: "none", stroke: c, "stroke-dasharray": dash }));
      }
    });
    const pre = document.createElement("pre");
    pre.textContent = `kappa = ${data.kappa}\n` + data.levels
      .map((l) => `n'=${l.n_prime}  E/m = ${l.energy.toFixed(10)}  closed form ${l.analytic.toFixed(10)}  rel ${Math.abs(l.energy / l.analytic - 1).toExponential(2)}`)
      .join("\n") + (data.notice ? `\nnote: ${data.notice}` : "");
    f.out.append(pre);
  });
}

function drawPairing() {
  const f = form("pairing");
  guard(f.out, () => {
    const d = JSON.parse(pairing(f.num("dim"), f.num("za"), f.num("ak"), f.num("count"), f.num("points")));
    const ys = [...d.plus_levels, ...d.minus_levels];
    const yr = [Math.min(...ys), Math.max(...ys)];
    const sy = scale(yr[0], yr[1], H - PAD, 20);
    const svg = newSvg(f.out);
    axes(svg, [-1, 1], yr, "kappa = +|kappa| (left), -|kappa| (right)", "E/m");
    const cols = [W * 0.33, W * 0.67];
    [d.plus_levels, d.minus_levels].forEach((lv, j) =>
      lv.forEach((e) => svg.append(el("line", { x1: cols[j] - 60, x2: cols[j] + 60, y1: sy(e), y2: sy(e), stroke: COLORS[j], "stroke-width": 2 }))));
    for (const p of d.pairs) {
      const a = d.plus_levels[p.plus_index], b = d.minus_levels[p.minus_index];
      svg.append(el("line", { x1: cols[0] + 60, x2: cols[1] - 60, y1: sy(a), y2: sy(b), stroke: "#999", "stroke-dasharray": "3 3" }));
    }
    const pre = document.createElement("pre");
    pre.textContent = `paired: ${d.pairs.length}, unpaired +: [${d.unpaired_plus}], unpaired -: [${d.unpaired_minus}]\n` +
      `Witten index ${d.witten_index}, max gap ${d.max_gap.toExponential(2)}, supersymmetric: ${d.supersymmetric}`;
    f.out.append(pre);
  });
}

await init();
for (const [id, fn] of [["scheme", drawScheme], ["spectrum", drawSpectrum], ["pairing", drawPairing]]) {
  document.querySelector(`#${id} button`).addEventListener("click", fn);
  fn();
}
