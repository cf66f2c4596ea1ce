/** Dependency-free horizontal bar chart for group-by results. */

import { GroupPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const ROW_HEIGHT = 24;
const LABEL_WIDTH = 230;
const BAR_AREA = 340;
const WIDTH = 640;

/** Render one bar per bucket, labels and counts exactly as served. */
export function barChart(doc: Document, payload: GroupPayload): SVGSVGElement {
  const buckets = payload.buckets;
  const height = Math.max(buckets.length * ROW_HEIGHT + 8, ROW_HEIGHT);
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${height}`);
  svg.setAttribute("width", "100%");
  svg.setAttribute("role", "img");
  svg.setAttribute("aria-label", `rows grouped by ${payload.column}`);
  svg.classList.add("bar-chart");

  const max = buckets.reduce((acc, b) => Math.max(acc, b.count), 0);
  buckets.forEach((bucket, i) => {
    const y = i * ROW_HEIGHT + 4;
    const group = doc.createElementNS(SVG_NS, "g");
    group.setAttribute("data-label", bucket.label);
    group.setAttribute("data-count", String(bucket.count));

    const label = doc.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(LABEL_WIDTH - 8));
    label.setAttribute("y", String(y + 15));
    label.setAttribute("text-anchor", "end");
    label.classList.add("bar-label");
    label.textContent = bucket.label;
    group.appendChild(label);

    const barWidth = max > 0 ? Math.max((bucket.count / max) * BAR_AREA, 1) : 0;
    const bar = doc.createElementNS(SVG_NS, "rect");
    bar.setAttribute("x", String(LABEL_WIDTH));
    bar.setAttribute("y", String(y + 4));
    bar.setAttribute("width", barWidth.toFixed(2));
    bar.setAttribute("height", String(ROW_HEIGHT - 10));
    bar.classList.add("bar");
    group.appendChild(bar);

    const count = doc.createElementNS(SVG_NS, "text");
    count.setAttribute("x", String(LABEL_WIDTH + barWidth + 6));
    count.setAttribute("y", String(y + 15));
    count.classList.add("bar-count");
    count.textContent = String(bucket.count);
    group.appendChild(count);

    svg.appendChild(group);
  });
  return svg;
}
