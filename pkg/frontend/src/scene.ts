/**
 * Scene model: everything the painter needs, computed as plain data.
 *
 * Two orthographic views: top-down (world x right, y up on screen) and side
 * (world x right, z up). The blimp is an ellipse oriented by yaw in the top
 * view and by pitch in the side view; obstacles come from the scenario file
 * when one is available. Keeping this pure keeps the painter trivial and the
 * geometry testable.
 */

import { CockpitState, goalDistance } from "./cockpit.js";
import { Vec3 } from "./protocol.js";

export interface ObstacleOutline {
  kind: "box" | "plane";
  // box: axis-aligned rectangle in the view plane; plane: a line
  min?: [number, number];
  max?: [number, number];
  normal?: [number, number];
  offset?: number;
}

export interface SceneObstacles {
  top: ObstacleOutline[];
  side: ObstacleOutline[];
}

export interface BlimpGlyph {
  x: number; // world coordinates of the view plane
  y: number;
  heading: number; // radians, orientation of the ellipse in this view
  semiMajor: number;
  semiMinor: number;
  contact: boolean;
}

export interface ViewModel {
  blimp: BlimpGlyph;
  goal: [number, number] | null;
  wind: [number, number];
  obstacles: ObstacleOutline[];
}

export interface ActuatorBars {
  f1: number; // fraction of thrust_max, [0, 1]
  f2: number;
  theta1: number; // radians
  theta2: number;
}

export interface SceneModel {
  ready: boolean;
  top: ViewModel | null;
  side: ViewModel | null;
  bars: ActuatorBars;
  altitude: number;
  speed: number;
  goalDistance: number | null;
  mode: string;
  contact: boolean;
  t: number;
}

export const HULL_SEMI_AXES: Vec3 = [0.4, 0.3, 0.25]; // display-only footprint
export const THRUST_MAX = 0.03; // bar full-scale, matches the reference vehicle

export function computeScene(
  state: CockpitState,
  obstacles: SceneObstacles = { top: [], side: [] },
): SceneModel {
  const latest = state.latest;
  if (latest === null) {
    return {
      ready: false,
      top: null,
      side: null,
      bars: { f1: 0, f2: 0, theta1: 0, theta2: 0 },
      altitude: 0,
      speed: 0,
      goalDistance: null,
      mode: state.mode,
      contact: false,
      t: 0,
    };
  }
  const [x, y, z] = latest.position;
  const [, theta, psi] = [latest.attitude[0], latest.attitude[1], latest.attitude[2]];
  const top: ViewModel = {
    blimp: {
      x,
      y,
      heading: psi,
      semiMajor: HULL_SEMI_AXES[0],
      semiMinor: HULL_SEMI_AXES[1],
      contact: latest.contact,
    },
    goal: state.goal ? [state.goal[0], state.goal[1]] : null,
    wind: [latest.wind[0], latest.wind[1]],
    obstacles: obstacles.top,
  };
  // positive pitch rotates the nose toward -z (right-hand rule about y)
  const side: ViewModel = {
    blimp: {
      x,
      y: z,
      heading: -theta,
      semiMajor: HULL_SEMI_AXES[0],
      semiMinor: HULL_SEMI_AXES[2],
      contact: latest.contact,
    },
    goal: state.goal ? [state.goal[0], state.goal[2]] : null,
    wind: [latest.wind[0], latest.wind[2]],
    obstacles: obstacles.side,
  };
  return {
    ready: true,
    top,
    side,
    bars: {
      f1: Math.min(latest.command.f1 / THRUST_MAX, 1),
      f2: Math.min(latest.command.f2 / THRUST_MAX, 1),
      theta1: latest.command.theta1,
      theta2: latest.command.theta2,
    },
    altitude: z,
    speed: Math.hypot(...latest.velocity),
    goalDistance: goalDistance(state),
    mode: latest.mode,
    contact: latest.contact,
    t: latest.t,
  };
}

interface RawObstacle {
  kind: string;
  min?: number[];
  max?: number[];
  normal?: number[];
  offset?: number;
}

/** Project scenario obstacles into both views (x/y and x/z planes). */
export function obstaclesFromScenario(doc: { obstacles?: RawObstacle[] }): SceneObstacles {
  const top: ObstacleOutline[] = [];
  const side: ObstacleOutline[] = [];
  for (const ob of doc.obstacles ?? []) {
    if (ob.kind === "box" && ob.min && ob.max) {
      top.push({ kind: "box", min: [ob.min[0], ob.min[1]], max: [ob.max[0], ob.max[1]] });
      side.push({ kind: "box", min: [ob.min[0], ob.min[2]], max: [ob.max[0], ob.max[2]] });
    } else if (ob.kind === "plane" && ob.normal) {
      const offset = ob.offset ?? 0;
      const [nx, ny, nz] = ob.normal;
      if (nx !== 0 || ny !== 0) {
        top.push({ kind: "plane", normal: [nx, ny], offset });
      }
      if (nx !== 0 || nz !== 0) {
        side.push({ kind: "plane", normal: [nx, nz], offset });
      }
    }
  }
  return { top, side };
}
