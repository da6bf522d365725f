/**
 * Pilot input: keyboard and gamepad mapped to the egocentric command axes.
 *
 * W/S drive surge, R/F heave, A/D yaw, Q/E roll; opposing keys cancel to
 * exactly zero. The same 0.05 dead zone the simulator applies server-side is
 * applied here, so what the pilot sees commanded is what the vehicle gets.
 */

export const DEAD_ZONE = 0.05;
export const SEND_RATE_HZ = 30;

export interface Axes {
  surge: number;
  heave: number;
  yaw: number;
  roll: number;
}

export const ZERO_AXES: Axes = { surge: 0, heave: 0, yaw: 0, roll: 0 };

const KEY_BINDINGS: Record<string, [keyof Axes, number]> = {
  w: ["surge", 1],
  s: ["surge", -1],
  r: ["heave", 1],
  f: ["heave", -1],
  a: ["yaw", 1], // +tau_z turns left
  d: ["yaw", -1],
  q: ["roll", 1],
  e: ["roll", -1],
};

export function clampAxis(value: number): number {
  if (!Number.isFinite(value)) return 0;
  return Math.min(Math.max(value, -1), 1);
}

export function applyDeadZone(value: number): number {
  return Math.abs(value) < DEAD_ZONE ? 0 : clampAxis(value);
}

/** Held keys (lowercase) to axes; opposing keys cancel exactly. */
export function axesFromKeys(held: ReadonlySet<string>): Axes {
  const axes = { ...ZERO_AXES };
  for (const key of held) {
    const bind = KEY_BINDINGS[key];
    if (bind) axes[bind[0]] += bind[1];
  }
  return {
    surge: applyDeadZone(axes.surge),
    heave: applyDeadZone(axes.heave),
    yaw: applyDeadZone(axes.yaw),
    roll: applyDeadZone(axes.roll),
  };
}

export function isBoundKey(key: string): boolean {
  return key in KEY_BINDINGS;
}

/**
 * Standard-layout gamepad: left stick surge/yaw, right stick heave/roll.
 * Stick "up" reads negative on the pad, hence the sign flips.
 */
export function axesFromGamepad(pad: { axes: ReadonlyArray<number> }): Axes {
  const axis = (i: number) => applyDeadZone(clampAxis(pad.axes[i] ?? 0));
  return {
    surge: applyDeadZone(-clampAxis(pad.axes[1] ?? 0)),
    heave: applyDeadZone(-clampAxis(pad.axes[3] ?? 0)),
    yaw: applyDeadZone(-clampAxis(pad.axes[0] ?? 0)),
    roll: axis(2),
  };
}

export function combineAxes(a: Axes, b: Axes): Axes {
  // keyboard and gamepad stack; magnitudes clamp back into [-1, 1]
  return {
    surge: clampAxis(a.surge + b.surge),
    heave: clampAxis(a.heave + b.heave),
    yaw: clampAxis(a.yaw + b.yaw),
    roll: clampAxis(a.roll + b.roll),
  };
}

export function axesEqual(a: Axes, b: Axes): boolean {
  return a.surge === b.surge && a.heave === b.heave && a.yaw === b.yaw && a.roll === b.roll;
}
