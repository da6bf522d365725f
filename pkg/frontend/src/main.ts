/**
 * Browser bootstrap: wiring between DOM, input, client, and painter.
 */

import { axesFromGamepad, axesFromKeys, combineAxes, isBoundKey } from "./axes.js";
import { CockpitClient } from "./client.js";
import { goalDistance } from "./cockpit.js";
import { renderBars, renderScene, Viewport } from "./render.js";
import { SceneObstacles, computeScene, obstaclesFromScenario } from "./scene.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const topCanvas = el<HTMLCanvasElement>("top-view");
const sideCanvas = el<HTMLCanvasElement>("side-view");
const urlInput = el<HTMLInputElement>("bridge-url");
const connectButton = el<HTMLButtonElement>("connect");
const statusLine = el<HTMLElement>("status");
const hud = el<HTMLElement>("hud");
const bars = el<HTMLElement>("bars");
const modeButton = el<HTMLButtonElement>("mode-toggle");
const resetButton = el<HTMLButtonElement>("reset");

let client: CockpitClient | null = null;
let obstacles: SceneObstacles = { top: [], side: [] };
const held = new Set<string>();

urlInput.value = `ws://${location.hostname || "127.0.0.1"}:8765`;

connectButton.addEventListener("click", () => {
  client?.stop();
  client = new CockpitClient(urlInput.value);
  client.start();
});

modeButton.addEventListener("click", () => {
  if (!client) return;
  const next = client.state.mode === "manual" ? "autopilot" : "manual";
  client.requestMode(next);
});

resetButton.addEventListener("click", () => client?.sendReset());

window.addEventListener("keydown", (event) => {
  const key = event.key.toLowerCase();
  if (isBoundKey(key)) {
    held.add(key);
    event.preventDefault();
  }
});
window.addEventListener("keyup", (event) => {
  held.delete(event.key.toLowerCase());
});
window.addEventListener("blur", () => held.clear());

// goal placement: click in the top view sets [x, y], keeping current altitude
topCanvas.addEventListener("click", (event) => {
  if (!client?.state.latest) return;
  const vp = topViewport();
  const rect = topCanvas.getBoundingClientRect();
  const sx = event.clientX - rect.left;
  const sy = event.clientY - rect.top;
  const x = vp.centerX + (sx - vp.width / 2) / vp.scale;
  const y = vp.centerY - (sy - vp.height / 2) / vp.scale;
  client.sendGoal([x, y, client.state.latest.position[2]]);
});

// input sampling: gamepad plus keyboard, pushed into the client's 30 Hz loop
setInterval(() => {
  if (!client) return;
  const pads = navigator.getGamepads ? navigator.getGamepads() : [];
  const pad = pads && pads[0];
  let axes = axesFromKeys(held);
  if (pad) axes = combineAxes(axes, axesFromGamepad(pad));
  client.setInputAxes(axes);
}, 1000 / 30);

function topViewport(): Viewport {
  const follow = client?.state.latest?.position ?? [0, 0, 0];
  return {
    width: topCanvas.width,
    height: topCanvas.height,
    centerX: follow[0],
    centerY: follow[1],
    scale: 60,
  };
}

function sideViewport(): Viewport {
  const follow = client?.state.latest?.position ?? [0, 0, 1];
  return {
    width: sideCanvas.width,
    height: sideCanvas.height,
    centerX: follow[0],
    centerY: follow[2],
    scale: 60,
  };
}

async function loadObstacles(scenario: string): Promise<void> {
  try {
    const response = await fetch(`scenarios/${scenario}.scenario`);
    if (!response.ok) return;
    obstacles = obstaclesFromScenario(await response.json());
  } catch {
    // no local copy of the scenario: views simply omit obstacle outlines
  }
}

let loadedScenario: string | null = null;

function frame(): void {
  requestAnimationFrame(frame);
  if (!client) {
    statusLine.textContent = "disconnected — enter the bridge URL and connect";
    return;
  }
  const state = client.state;
  if (state.scenario && state.scenario !== loadedScenario) {
    loadedScenario = state.scenario;
    void loadObstacles(state.scenario);
  }
  statusLine.textContent =
    state.status === "connected"
      ? `connected — ${state.scenario} (protocol ${state.serverVersion})`
      : state.status === "version-mismatch"
        ? `protocol mismatch: server v${state.serverVersion}`
        : state.status;
  statusLine.dataset.status = state.status;

  const scene = computeScene(state, obstacles);
  if (scene.ready) {
    const distance = goalDistance(state);
    hud.textContent =
      `t ${scene.t.toFixed(2)} s   mode ${scene.mode}   alt ${scene.altitude.toFixed(2)} m   ` +
      `speed ${scene.speed.toFixed(2)} m/s` +
      (distance !== null ? `   goal ${distance.toFixed(2)} m` : "") +
      (scene.contact ? "   CONTACT" : "");
    const topCtx = topCanvas.getContext("2d");
    const sideCtx = sideCanvas.getContext("2d");
    if (topCtx && sideCtx) {
      renderScene(scene, topCtx, sideCtx, topViewport(), sideViewport());
    }
    renderBars(scene, bars);
    modeButton.textContent = scene.mode === "manual" ? "engage autopilot" : "manual";
  }
}

frame();
