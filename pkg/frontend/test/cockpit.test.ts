import { describe, expect, test } from "vitest";

import {
  goalDistance,
  initialCockpitState,
  onHello,
  onState,
  setGoal,
} from "../src/cockpit.js";
import { StateMsg } from "../src/protocol.js";

function stateMsg(t: number, position: [number, number, number]): StateMsg {
  return {
    type: "state",
    t,
    position,
    velocity: [0, 0, 0],
    attitude: [0, 0, 0],
    angular_velocity: [0, 0, 0],
    command: { f1: 0, f2: 0, theta1: 0, theta2: 0 },
    wind: [0, 0, 0],
    mode: "manual",
    contact: false,
  };
}

describe("connection handshake", () => {
  test("hello with the expected version connects", () => {
    const s = initialCockpitState();
    onHello(s, { type: "hello", version: 1, scenario: "hover" });
    expect(s.status).toBe("connected");
    expect(s.scenario).toBe("hover");
  });

  test("version 2 hello flags an explicit mismatch", () => {
    const s = initialCockpitState();
    onHello(s, { type: "hello", version: 2, scenario: "hover" });
    expect(s.status).toBe("version-mismatch");
    expect(s.warnings.some((w) => w.includes("protocol 2"))).toBe(true);
  });
});

describe("telemetry freshness", () => {
  test("rendered telemetry is never older than the last received state", () => {
    const s = initialCockpitState();
    expect(onState(s, stateMsg(1.0, [1, 0, 0]))).toBe(true);
    expect(onState(s, stateMsg(2.0, [2, 0, 0]))).toBe(true);
    // an out-of-order straggler must not roll telemetry back
    expect(onState(s, stateMsg(1.5, [9, 9, 9]))).toBe(false);
    expect(s.latest?.t).toBe(2.0);
    expect(s.latest?.position[0]).toBe(2);
  });

  test("state messages update the displayed mode", () => {
    const s = initialCockpitState();
    const msg = stateMsg(0.5, [0, 0, 0]);
    msg.mode = "autopilot";
    onState(s, msg);
    expect(s.mode).toBe("autopilot");
  });
});

describe("goal readout", () => {
  test("distance readout equals |goal - position| of the latest state", () => {
    const s = initialCockpitState();
    onState(s, stateMsg(1.0, [1.0, 2.0, 3.0]));
    setGoal(s, [4.0, 6.0, 3.0]);
    expect(goalDistance(s)).toBeCloseTo(Math.hypot(3, 4, 0), 12);
  });

  test("no goal or no telemetry means no readout", () => {
    const s = initialCockpitState();
    expect(goalDistance(s)).toBeNull();
    setGoal(s, [1, 1, 1]);
    expect(goalDistance(s)).toBeNull();
  });
});
