import { describe, expect, it } from "vitest";

import type { Panel } from "../src/series.js";
import { panelExtents, renderPanel, sharedYExtent } from "../src/svg.js";

const LINE_PANEL: Panel = {
  title: "test",
  yLabel: "f",
  series: [
    { kind: "line", label: "curve", x: [0, 0.25, 0.5], y: [1, 2, 0.5], color: "#000" },
    { kind: "band", label: "band", x: [0, 0.25, 0.5], lower: [0.5, 1.5, 0], upper: [1.5, 2.5, 1], color: "#ccc" },
  ],
};

describe("panel extents", () => {
  it("cover every drawn series with padding", () => {
    const ext = panelExtents(LINE_PANEL);
    expect(ext.x.min).toBe(0);
    expect(ext.x.max).toBe(0.5);
    expect(ext.y.min).toBeLessThan(0);
    expect(ext.y.max).toBeGreaterThan(2.5);
  });

  it("shared extent covers every panel so tails and center compare", () => {
    const narrow: Panel = {
      title: "center",
      yLabel: "f",
      series: [{ kind: "line", label: "c", x: [0, 1], y: [0.9, 1.1], color: "#000" }],
    };
    const wide: Panel = {
      title: "tail",
      yLabel: "f",
      series: [{ kind: "line", label: "t", x: [0, 1], y: [-0.5, 3.0], color: "#000" }],
    };
    const shared = sharedYExtent([narrow, wide]);
    expect(shared.min).toBeLessThanOrEqual(-0.5);
    expect(shared.max).toBeGreaterThanOrEqual(3.0);
    // rendering the narrow panel on the shared scale must not throw and
    // must place its curve inside the taller range
    expect(renderPanel(narrow, undefined, shared).startsWith("<svg")).toBe(true);
  });

  it("degenerate flat data still spans a window", () => {
    const ext = panelExtents({
      title: "flat",
      yLabel: "f",
      series: [{ kind: "line", label: "c", x: [0, 1], y: [1, 1], color: "#000" }],
    });
    expect(ext.y.max).toBeGreaterThan(ext.y.min);
  });
});

describe("svg rendering", () => {
  it("emits one polyline per line and one polygon per band", () => {
    const svg = renderPanel(LINE_PANEL);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/<polyline /g)?.length).toBe(1);
    expect(svg.match(/<polygon /g)?.length).toBe(1);
    const pts = /<polyline points="([^"]+)"/.exec(svg);
    expect(pts && pts[1].split(" ").length).toBe(3);
  });

  it("stems render one line+dot per lag and mark failures", () => {
    const svg = renderPanel({
      title: "acf",
      yLabel: "rho",
      series: [
        { kind: "stem", label: "rho", x: [1, 2, 3], y: [0.5, -0.2, 0.1], color: "#00f", flags: [true, false, true] },
        { kind: "marker", label: "m = 2", x: 2.5, color: "#888" },
      ],
    });
    expect(svg.match(/<circle /g)?.length).toBe(3);
    expect(svg).toContain("#f59e0b"); // non-converged stem highlighted
    expect(svg).toContain("stroke-dasharray");
  });

  it("escapes markup in labels", () => {
    const svg = renderPanel({
      title: "<script>",
      yLabel: "f",
      series: [{ kind: "line", label: "a&b", x: [0, 1], y: [0, 1], color: "#000" }],
    });
    expect(svg).not.toContain("<script>");
    expect(svg).toContain("&lt;script&gt;");
    expect(svg).toContain("a&amp;b");
  });

  it("deterministic output for identical input", () => {
    expect(renderPanel(LINE_PANEL)).toBe(renderPanel(LINE_PANEL));
  });
});
