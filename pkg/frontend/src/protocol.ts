/**
 * Wire protocol (version 1) spoken by the simulator bridge: one JSON object
 * per newline-terminated line. This module is the single source of truth for
 * message shapes on the cockpit side; everything rendered traces back to a
 * field decoded here.
 */

export const PROTOCOL_VERSION = 1;

export type Vec3 = [number, number, number];

export interface HelloMsg {
  type: "hello";
  version: number;
  scenario: string;
}

export interface StateMsg {
  type: "state";
  t: number;
  position: Vec3;
  velocity: Vec3;
  attitude: Vec3; // phi, theta, psi
  angular_velocity: Vec3;
  command: { f1: number; f2: number; theta1: number; theta2: number };
  wind: Vec3;
  mode: "manual" | "autopilot";
  contact: boolean;
}

export interface CmdMsg {
  type: "cmd";
  surge: number;
  heave: number;
  yaw: number;
  roll: number;
}

export interface ModeMsg {
  type: "mode";
  value: "manual" | "autopilot";
}

export interface GoalMsg {
  type: "goal";
  value: Vec3;
}

export interface ResetMsg {
  type: "reset";
}

export type Message = HelloMsg | StateMsg | CmdMsg | ModeMsg | GoalMsg | ResetMsg;

export class ProtocolError extends Error {}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function asVec3(v: unknown, field: string): Vec3 {
  if (!Array.isArray(v) || v.length !== 3 || !v.every(isFiniteNumber)) {
    throw new ProtocolError(`field '${field}' must be a 3-list of finite numbers`);
  }
  return [v[0], v[1], v[2]];
}

function asNumber(v: unknown, field: string): number {
  if (!isFiniteNumber(v)) {
    throw new ProtocolError(`field '${field}' must be a finite number`);
  }
  return v;
}

/** Encode a message as one line (no trailing newline). JSON.stringify uses
 * the shortest round-trip representation for doubles, so numeric fields
 * survive the wire exactly. */
export function encode(msg: Message): string {
  return JSON.stringify(msg);
}

/** Decode one line into a message, validating shape; throws ProtocolError. */
export function decode(line: string): Message {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new ProtocolError(`not valid JSON: ${line}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ProtocolError(`message must be a JSON object: ${line}`);
  }
  const rec = obj as Record<string, unknown>;
  switch (rec.type) {
    case "hello": {
      if (!Number.isInteger(rec.version) || typeof rec.scenario !== "string") {
        throw new ProtocolError(`malformed hello: ${line}`);
      }
      return { type: "hello", version: rec.version as number, scenario: rec.scenario };
    }
    case "state": {
      const cmd = rec.command as Record<string, unknown>;
      if (typeof cmd !== "object" || cmd === null) {
        throw new ProtocolError(`state.command must be an object: ${line}`);
      }
      if (rec.mode !== "manual" && rec.mode !== "autopilot") {
        throw new ProtocolError(`malformed state mode: ${line}`);
      }
      if (typeof rec.contact !== "boolean") {
        throw new ProtocolError(`malformed state contact: ${line}`);
      }
      return {
        type: "state",
        t: asNumber(rec.t, "t"),
        position: asVec3(rec.position, "position"),
        velocity: asVec3(rec.velocity, "velocity"),
        attitude: asVec3(rec.attitude, "attitude"),
        angular_velocity: asVec3(rec.angular_velocity, "angular_velocity"),
        command: {
          f1: asNumber(cmd.f1, "command.f1"),
          f2: asNumber(cmd.f2, "command.f2"),
          theta1: asNumber(cmd.theta1, "command.theta1"),
          theta2: asNumber(cmd.theta2, "command.theta2"),
        },
        wind: asVec3(rec.wind, "wind"),
        mode: rec.mode,
        contact: rec.contact,
      };
    }
    case "cmd":
      return {
        type: "cmd",
        surge: asNumber(rec.surge, "surge"),
        heave: asNumber(rec.heave, "heave"),
        yaw: asNumber(rec.yaw, "yaw"),
        roll: asNumber(rec.roll, "roll"),
      };
    case "mode": {
      if (rec.value !== "manual" && rec.value !== "autopilot") {
        throw new ProtocolError(`mode must be 'manual' or 'autopilot': ${line}`);
      }
      return { type: "mode", value: rec.value };
    }
    case "goal":
      return { type: "goal", value: asVec3(rec.value, "value") };
    case "reset":
      return { type: "reset" };
    default:
      throw new ProtocolError(`unknown message type '${String(rec.type)}': ${line}`);
  }
}
