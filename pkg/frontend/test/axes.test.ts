import { describe, expect, test } from "vitest";

import {
  DEAD_ZONE,
  applyDeadZone,
  axesFromGamepad,
  axesFromKeys,
  clampAxis,
  combineAxes,
} from "../src/axes.js";

describe("keyboard mapping", () => {
  test("no keys held gives all-zero axes", () => {
    expect(axesFromKeys(new Set())).toEqual({ surge: 0, heave: 0, yaw: 0, roll: 0 });
  });

  test("W drives full surge", () => {
    expect(axesFromKeys(new Set(["w"])).surge).toBe(1);
  });

  test("opposing keys cancel to exact zero", () => {
    const axes = axesFromKeys(new Set(["w", "s", "a", "d"]));
    expect(axes.surge).toBe(0);
    expect(axes.yaw).toBe(0);
  });

  test("full bindings route to their channels", () => {
    expect(axesFromKeys(new Set(["r"])).heave).toBe(1);
    expect(axesFromKeys(new Set(["f"])).heave).toBe(-1);
    expect(axesFromKeys(new Set(["a"])).yaw).toBe(1);
    expect(axesFromKeys(new Set(["d"])).yaw).toBe(-1);
    expect(axesFromKeys(new Set(["q"])).roll).toBe(1);
    expect(axesFromKeys(new Set(["e"])).roll).toBe(-1);
  });

  test("unbound keys are ignored", () => {
    expect(axesFromKeys(new Set(["x", "enter"]))).toEqual({
      surge: 0,
      heave: 0,
      yaw: 0,
      roll: 0,
    });
  });
});

describe("dead zone and clamping", () => {
  test("dead zone maps small values to exactly zero", () => {
    expect(applyDeadZone(0.049)).toBe(0);
    expect(applyDeadZone(-0.02)).toBe(0);
    expect(applyDeadZone(DEAD_ZONE)).toBe(DEAD_ZONE);
  });

  test("clamp bounds to [-1, 1] and zeroes non-finite input", () => {
    expect(clampAxis(3)).toBe(1);
    expect(clampAxis(-42)).toBe(-1);
    expect(clampAxis(Number.NaN)).toBe(0);
  });

  test("combining keyboard and gamepad clamps the sum", () => {
    const sum = combineAxes(
      { surge: 1, heave: 0, yaw: -1, roll: 0 },
      { surge: 0.5, heave: 0, yaw: -0.5, roll: 0 },
    );
    expect(sum.surge).toBe(1);
    expect(sum.yaw).toBe(-1);
  });
});

describe("gamepad mapping", () => {
  test("left stick forward (negative y) is positive surge", () => {
    expect(axesFromGamepad({ axes: [0, -1, 0, 0] }).surge).toBe(1);
  });

  test("left stick left is positive yaw (turn left)", () => {
    expect(axesFromGamepad({ axes: [-1, 0, 0, 0] }).yaw).toBe(1);
  });

  test("stick noise inside the dead zone is silenced", () => {
    const axes = axesFromGamepad({ axes: [0.02, -0.03, 0.01, 0.04] });
    expect(axes).toEqual({ surge: 0, heave: 0, yaw: 0, roll: 0 });
  });
});
