/**
 * Cockpit state: a plain store fed by protocol messages and input events.
 *
 * The cockpit holds no physics. Telemetry is whatever the latest `state`
 * message said (never older: stale or out-of-order messages are dropped),
 * and every displayed number traces to a protocol field or to the goal
 * marker the pilot placed.
 */

import { Axes, ZERO_AXES } from "./axes.js";
import { PROTOCOL_VERSION, HelloMsg, StateMsg, Vec3 } from "./protocol.js";

export type ConnectionStatus =
  | "disconnected"
  | "connecting"
  | "connected"
  | "version-mismatch";

export interface CockpitState {
  status: ConnectionStatus;
  scenario: string | null;
  serverVersion: number | null;
  latest: StateMsg | null;
  axes: Axes;
  mode: "manual" | "autopilot";
  goal: Vec3 | null;
  statesReceived: number;
  warnings: string[];
}

export function initialCockpitState(): CockpitState {
  return {
    status: "disconnected",
    scenario: null,
    serverVersion: null,
    latest: null,
    axes: { ...ZERO_AXES },
    mode: "manual",
    goal: null,
    statesReceived: 0,
    warnings: [],
  };
}

export function onConnecting(state: CockpitState): void {
  state.status = "connecting";
}

export function onDisconnected(state: CockpitState): void {
  state.status = "disconnected";
}

export function onHello(state: CockpitState, hello: HelloMsg): void {
  state.scenario = hello.scenario;
  state.serverVersion = hello.version;
  if (hello.version !== PROTOCOL_VERSION) {
    state.status = "version-mismatch";
    state.warnings.push(
      `server speaks protocol ${hello.version}, cockpit expects ${PROTOCOL_VERSION}`,
    );
  } else {
    state.status = "connected";
  }
}

/** Accept a state message unless it is older than what is already shown. */
export function onState(state: CockpitState, msg: StateMsg): boolean {
  if (state.latest !== null && msg.t < state.latest.t) {
    return false;
  }
  state.latest = msg;
  state.mode = msg.mode;
  state.statesReceived += 1;
  return true;
}

export function setAxes(state: CockpitState, axes: Axes): void {
  state.axes = axes;
}

export function setGoal(state: CockpitState, goal: Vec3): void {
  state.goal = goal;
}

/** Straight-line distance from the latest telemetry to the goal marker. */
export function goalDistance(state: CockpitState): number | null {
  if (state.goal === null || state.latest === null) return null;
  const p = state.latest.position;
  const g = state.goal;
  return Math.hypot(g[0] - p[0], g[1] - p[1], g[2] - p[2]);
}
