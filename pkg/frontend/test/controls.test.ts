import { describe, expect, it } from "vitest";

import { Controller, DriveAction, messagesFor } from "../src/controls.js";
import { ClientMessage } from "../src/messages.js";

describe("control to message mapping", () => {
  it("forward sets direction then enables", () => {
    expect(messagesFor({ kind: "forward" })).toEqual([
      { type: "digital", line: 1, value: 1 },
      { type: "digital", line: 0, value: 1 },
    ]);
  });

  it("backward sets direction low then enables", () => {
    expect(messagesFor({ kind: "backward" })).toEqual([
      { type: "digital", line: 1, value: 0 },
      { type: "digital", line: 0, value: 1 },
    ]);
  });

  it("enable and disable touch only line 0", () => {
    expect(messagesFor({ kind: "enable" })).toEqual([
      { type: "digital", line: 0, value: 1 },
    ]);
    expect(messagesFor({ kind: "disable" })).toEqual([
      { type: "digital", line: 0, value: 0 },
    ]);
  });

  it("throttle 50% maps to four pwm values of 500", () => {
    expect(messagesFor({ kind: "throttle", permille: 500 })).toEqual([
      { type: "pwm", values: [500, 500, 500, 500] },
    ]);
  });

  it("throttle clamps to 0..1000", () => {
    expect(messagesFor({ kind: "throttle", permille: 1500 })).toEqual([
      { type: "pwm", values: [1000, 1000, 1000, 1000] },
    ]);
    expect(messagesFor({ kind: "throttle", permille: -5 })).toEqual([
      { type: "pwm", values: [0, 0, 0, 0] },
    ]);
  });

  it("latency test carries its parameters", () => {
    expect(messagesFor({ kind: "latency_test" })).toEqual([
      { type: "latency_test", rounds: 1, probes: 50 },
    ]);
  });

  it("full mapping table snapshot", () => {
    const actions: DriveAction[] = [
      { kind: "enable" },
      { kind: "disable" },
      { kind: "forward" },
      { kind: "backward" },
      { kind: "throttle", permille: 250 },
      { kind: "latency_test" },
    ];
    const table = Object.fromEntries(
      actions.map((a) => [JSON.stringify(a), messagesFor(a)]),
    );
    expect(table).toMatchSnapshot();
  });
});

describe("verification gate", () => {
  function harness(verified: () => boolean) {
    const sent: ClientMessage[] = [];
    const controller = new Controller({ send: (m) => sent.push(m) }, verified);
    return { sent, controller };
  }

  it("emits nothing before verified", () => {
    const { sent, controller } = harness(() => false);
    for (const action of [
      { kind: "forward" },
      { kind: "disable" },
      { kind: "throttle", permille: 100 },
    ] as DriveAction[]) {
      expect(controller.drive(action)).toBe(false);
    }
    expect(sent).toEqual([]);
    expect(controller.hint).toMatch(/not verified/);
  });

  it("emits once verified and clears the hint", () => {
    let verified = false;
    const { sent, controller } = harness(() => verified);
    controller.drive({ kind: "forward" });
    expect(sent).toEqual([]);
    verified = true;
    expect(controller.drive({ kind: "forward" })).toBe(true);
    expect(sent).toHaveLength(2);
    expect(controller.hint).toBeNull();
  });
});
