import { describe, expect, it } from "vitest";

import { centsToEuroLabel, centsToText, milliToText } from "../src/money.js";

describe("centsToText", () => {
  it("renders the three pilot amounts", () => {
    expect(centsToText(0)).toBe("0.00");
    expect(centsToText(50)).toBe("0.50");
    expect(centsToText(100)).toBe("1.00");
  });

  it("always yields two decimals over a wide range", () => {
    for (let cents = 0; cents <= 5000; cents += 1) {
      const text = centsToText(cents);
      expect(text).toMatch(/^\d+\.\d{2}$/);
      const [euros, rest] = text.split(".");
      expect(Number(euros) * 100 + Number(rest)).toBe(cents);
    }
  });
});

describe("milliToText", () => {
  it("renders computed quantities from wire integers", () => {
    expect(milliToText(1600)).toBe("1.60");
    expect(milliToText(600)).toBe("0.60");
    expect(milliToText(2400)).toBe("2.40");
    expect(milliToText(16600)).toBe("16.60");
    expect(milliToText(11100)).toBe("11.10");
  });

  it("is exact for every multiple of ten", () => {
    for (let milli = 0; milli <= 20000; milli += 10) {
      const text = milliToText(milli);
      const [euros, rest] = text.split(".");
      expect(Number(euros) * 1000 + Number(rest) * 10).toBe(milli);
    }
  });

  it("rounds sub-cent milli half-up without floats", () => {
    expect(milliToText(202)).toBe("0.20");
    expect(milliToText(205)).toBe("0.21");
    expect(milliToText(209)).toBe("0.21");
  });
});

describe("centsToEuroLabel", () => {
  it("labels the choice buttons", () => {
    expect(centsToEuroLabel(50)).toBe("0.50 €");
  });
});
