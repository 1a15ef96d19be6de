// Vanilla-JS front end for the wasm bindings: draws the classification map,
// reports stability indices at a clicked parameter point, and plots one
// simulated trajectory.

import init, { classify_grid, indices_json, simulate_trajectory } from "../pkg/rsp_demo.js";

const COLORS = {
  EAS: "#2e7d32",
  FAS: "#f9a825",
  CU: "#c62828",
  NonAttractor: "#6a1b9a",
  Boundary: "#bdbdbd",
};
const SERIES = ["#c62828", "#2e7d32", "#1565c0"]; // rock, scissors, paper
const RESOLUTION = 101;
const SEED = [0.6, 0.2, 0.2, 0.2, 0.2, 0.6];

let grid = null;
let point = { x: -0.3, y: -0.3 };

const mapCanvas = document.getElementById("map");
const trajCanvas = document.getElementById("traj");
const cycleSelect = document.getElementById("cycle-select");

function drawMap() {
  const ctx = mapCanvas.getContext("2d");
  const n = grid.resolution;
  const tags = grid.classes[cycleSelect.value];
  const w = mapCanvas.width / n;
  const h = mapCanvas.height / n;
  for (let j = 0; j < n; j++) {
    for (let i = 0; i < n; i++) {
      ctx.fillStyle = COLORS[tags[j * n + i]] ?? "#000";
      // eps_y increases upwards, canvas y increases downwards.
      ctx.fillRect(i * w, mapCanvas.height - (j + 1) * h, Math.ceil(w), Math.ceil(h));
    }
  }
  // Crosshair at the selected parameter point.
  const px = ((point.x + 1) / 2) * mapCanvas.width;
  const py = mapCanvas.height - ((point.y + 1) / 2) * mapCanvas.height;
  ctx.strokeStyle = "#000";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(px - 6, py); ctx.lineTo(px + 6, py);
  ctx.moveTo(px, py - 6); ctx.lineTo(px, py + 6);
  ctx.stroke();
}

function drawLegend() {
  document.getElementById("legend").innerHTML = Object.entries(COLORS)
    .map(([tag, color]) => `<span><span class="swatch" style="background:${color}"></span>${tag}</span>`)
    .join("");
}

function formatSigma(v) {
  if (v === "inf") return "+∞";
  if (v === "-inf") return "−∞";
  return v.toFixed(4);
}

function showIndices() {
  document.getElementById("point-label").textContent =
    `(εx, εy) = (${point.x.toFixed(3)}, ${point.y.toFixed(3)})`;
  const doc = JSON.parse(indices_json(point.x, point.y));
  if (doc.error) {
    document.getElementById("indices").textContent = doc.error;
    return;
  }
  const rows = doc.results.map((r) => {
    const sigma = Object.entries(r.sigma)
      .map(([node, v]) => `${node}: ${formatSigma(v)}`)
      .join("  ");
    return `<tr><td>${r.cycle}</td><td style="color:${COLORS[r.classification]}">${r.classification}</td><td>${sigma || "—"}</td></tr>`;
  });
  document.getElementById("indices").innerHTML =
    `<table><tr><th>cycle</th><th>class</th><th>σ per node</th></tr>${rows.join("")}</table>`;
}

function drawTrajectory() {
  const status = document.getElementById("sim-status");
  status.textContent = "integrating…";
  const doc = JSON.parse(simulate_trajectory(point.x, point.y, SEED, 300, 1e-3, 50));
  if (doc.error) {
    status.textContent = doc.error;
    return;
  }
  status.textContent = `${doc.times.length} samples, ${doc.itinerary.length} vertex visits`;
  const ctx = trajCanvas.getContext("2d");
  const { width, height } = trajCanvas;
  ctx.clearRect(0, 0, width, height);
  const tMax = doc.times[doc.times.length - 1];
  const toX = (t) => (t / tMax) * width;
  const toY = (f) => height - f * (height - 10) - 5;
  for (let coord = 0; coord < 6; coord++) {
    ctx.strokeStyle = SERIES[coord % 3];
    ctx.setLineDash(coord < 3 ? [] : [6, 4]);
    ctx.lineWidth = 1.2;
    ctx.beginPath();
    doc.states.forEach((s, k) => {
      const [x, y] = [toX(doc.times[k]), toY(s[coord])];
      k === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
  ctx.setLineDash([]);
  const visits = doc.itinerary
    .map((v) => `${v.label} [${v.entry.toFixed(1)}, ${v.exit.toFixed(1)}]`)
    .join("  →  ");
  document.getElementById("itinerary").textContent = visits || "no vertex visits yet";
}

function onMapClick(event) {
  const rect = mapCanvas.getBoundingClientRect();
  const fx = (event.clientX - rect.left) / rect.width;
  const fy = (event.clientY - rect.top) / rect.height;
  const clamp = (v) => Math.min(0.995, Math.max(-0.995, v));
  point = { x: clamp(fx * 2 - 1), y: clamp((1 - fy) * 2 - 1) };
  drawMap();
  showIndices();
}

async function main() {
  await init();
  grid = JSON.parse(classify_grid(RESOLUTION));
  drawLegend();
  drawMap();
  showIndices();
  cycleSelect.addEventListener("change", drawMap);
  mapCanvas.addEventListener("click", onMapClick);
  document.getElementById("simulate").addEventListener("click", drawTrajectory);
}

main();
