/**
 * Canvas painter for the scene model. Pure drawing: all geometry decisions
 * live in scene.ts where they are tested.
 */

import { SceneModel, ViewModel } from "./scene.js";

export interface Viewport {
  width: number;
  height: number;
  centerX: number; // world coordinate at the canvas center (view plane)
  centerY: number;
  scale: number; // pixels per meter
}

export function worldToScreen(
  vp: Viewport,
  x: number,
  y: number,
): [number, number] {
  return [
    vp.width / 2 + (x - vp.centerX) * vp.scale,
    vp.height / 2 - (y - vp.centerY) * vp.scale,
  ];
}

function drawView(ctx: CanvasRenderingContext2D, vp: Viewport, view: ViewModel, label: string) {
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.save();

  // grid every meter
  ctx.strokeStyle = "#1c2733";
  ctx.lineWidth = 1;
  const metersWide = vp.width / vp.scale;
  const metersTall = vp.height / vp.scale;
  const x0 = Math.floor(vp.centerX - metersWide / 2);
  const y0 = Math.floor(vp.centerY - metersTall / 2);
  for (let gx = x0; gx <= vp.centerX + metersWide / 2; gx += 1) {
    const [sx] = worldToScreen(vp, gx, 0);
    ctx.beginPath();
    ctx.moveTo(sx, 0);
    ctx.lineTo(sx, vp.height);
    ctx.stroke();
  }
  for (let gy = y0; gy <= vp.centerY + metersTall / 2; gy += 1) {
    const [, sy] = worldToScreen(vp, 0, gy);
    ctx.beginPath();
    ctx.moveTo(0, sy);
    ctx.lineTo(vp.width, sy);
    ctx.stroke();
  }

  // obstacles
  ctx.strokeStyle = "#d08c3a";
  ctx.fillStyle = "rgba(208,140,58,0.15)";
  ctx.lineWidth = 2;
  for (const ob of view.obstacles) {
    if (ob.kind === "box" && ob.min && ob.max) {
      const [ax, ay] = worldToScreen(vp, ob.min[0], ob.max[1]);
      const [bx, by] = worldToScreen(vp, ob.max[0], ob.min[1]);
      ctx.fillRect(ax, ay, bx - ax, by - ay);
      ctx.strokeRect(ax, ay, bx - ax, by - ay);
    } else if (ob.kind === "plane" && ob.normal) {
      const [nx, ny] = ob.normal;
      const off = ob.offset ?? 0;
      // draw the boundary line n.(x,y) = offset across the viewport
      const px = nx * off;
      const py = ny * off;
      const dirX = -ny;
      const dirY = nx;
      const span = Math.max(metersWide, metersTall);
      const [sx1, sy1] = worldToScreen(vp, px - dirX * span, py - dirY * span);
      const [sx2, sy2] = worldToScreen(vp, px + dirX * span, py + dirY * span);
      ctx.beginPath();
      ctx.moveTo(sx1, sy1);
      ctx.lineTo(sx2, sy2);
      ctx.stroke();
    }
  }

  // goal marker
  if (view.goal) {
    const [gx, gy] = worldToScreen(vp, view.goal[0], view.goal[1]);
    ctx.strokeStyle = "#46c46e";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(gx, gy, 7, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(gx - 10, gy);
    ctx.lineTo(gx + 10, gy);
    ctx.moveTo(gx, gy - 10);
    ctx.lineTo(gx, gy + 10);
    ctx.stroke();
  }

  // blimp ellipse + nose tick
  const b = view.blimp;
  const [bx, by] = worldToScreen(vp, b.x, b.y);
  ctx.translate(bx, by);
  ctx.rotate(-b.heading); // screen y is flipped
  ctx.strokeStyle = b.contact ? "#ff5d5d" : "#69b7ff";
  ctx.fillStyle = b.contact ? "rgba(255,93,93,0.25)" : "rgba(105,183,255,0.2)";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.ellipse(0, 0, b.semiMajor * vp.scale, b.semiMinor * vp.scale, 0, 0, 2 * Math.PI);
  ctx.fill();
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(0, 0);
  ctx.lineTo(b.semiMajor * vp.scale, 0);
  ctx.stroke();
  ctx.restore();

  // wind vector (anchored top-left)
  ctx.save();
  ctx.strokeStyle = "#b9a0e8";
  ctx.lineWidth = 2;
  const wx = 40;
  const wy = 40;
  const windScale = 25; // px per m/s
  ctx.beginPath();
  ctx.moveTo(wx, wy);
  ctx.lineTo(wx + view.wind[0] * windScale, wy - view.wind[1] * windScale);
  ctx.stroke();
  ctx.fillStyle = "#8d9aa8";
  ctx.font = "12px monospace";
  ctx.fillText(`${label}  wind ${Math.hypot(view.wind[0], view.wind[1]).toFixed(2)} m/s`, 12, 16);
  ctx.restore();
}

export function renderScene(
  scene: SceneModel,
  topCtx: CanvasRenderingContext2D,
  sideCtx: CanvasRenderingContext2D,
  topViewport: Viewport,
  sideViewport: Viewport,
): void {
  if (!scene.ready || !scene.top || !scene.side) return;
  drawView(topCtx, topViewport, scene.top, "top (x/y)");
  drawView(sideCtx, sideViewport, scene.side, "side (x/z)");
}

export function renderBars(scene: SceneModel, container: HTMLElement): void {
  const rows: Array<[string, number, string]> = [
    ["f1", scene.bars.f1, `${(scene.bars.f1 * 100).toFixed(0)}%`],
    ["f2", scene.bars.f2, `${(scene.bars.f2 * 100).toFixed(0)}%`],
    ["th1", (scene.bars.theta1 + Math.PI / 2) / Math.PI, `${((scene.bars.theta1 * 180) / Math.PI).toFixed(0)}°`],
    ["th2", (scene.bars.theta2 + Math.PI / 2) / Math.PI, `${((scene.bars.theta2 * 180) / Math.PI).toFixed(0)}°`],
  ];
  for (const [name, fraction, text] of rows) {
    const fill = container.querySelector<HTMLElement>(`[data-bar="${name}"] .fill`);
    const value = container.querySelector<HTMLElement>(`[data-bar="${name}"] .value`);
    if (fill) fill.style.width = `${Math.max(0, Math.min(1, fraction)) * 100}%`;
    if (value) value.textContent = text;
  }
}
