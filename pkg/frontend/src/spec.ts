/** Plot description consumed by the renderer. */

export interface SeriesSpec {
  path: string;
  color?: string;
  label?: string;
}

export interface PlotSpec {
  series: SeriesSpec[];
  /** [xmin, xmax, ymin, ymax]; equal-aspect rendering */
  axis?: [number, number, number, number];
  output: string;
  format?: "svg" | "png";
  title?: string;
}

export const DEFAULT_AXIS: [number, number, number, number] = [-2, 2, -2, 2];

/** Legend palette, applied in order to series without an explicit color. */
export const DEFAULT_PALETTE = ["blue", "red", "black", "teal", "orange"];

export function validateSpec(raw: unknown): PlotSpec {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("plot spec must be a JSON object");
  }
  const o = raw as Record<string, unknown>;
  if (!Array.isArray(o.series) || o.series.length === 0) {
    throw new Error("plot spec needs at least one series");
  }
  const series: SeriesSpec[] = o.series.map((s, i) => {
    if (typeof s !== "object" || s === null || typeof (s as any).path !== "string") {
      throw new Error(`series[${i}] needs a 'path'`);
    }
    return s as SeriesSpec;
  });
  if (typeof o.output !== "string" || o.output === "") {
    throw new Error("plot spec needs an 'output' path");
  }
  let axis = DEFAULT_AXIS;
  if (o.axis !== undefined) {
    if (!Array.isArray(o.axis) || o.axis.length !== 4 ||
        o.axis.some((v) => typeof v !== "number" || !Number.isFinite(v))) {
      throw new Error("axis must be [xmin, xmax, ymin, ymax]");
    }
    const [x0, x1, y0, y1] = o.axis as number[];
    if (!(x0 < x1 && y0 < y1)) {
      throw new Error("axis bounds must increase");
    }
    axis = [x0, x1, y0, y1];
  }
  const format = (o.format ?? "svg") as string;
  if (format !== "svg" && format !== "png") {
    throw new Error(`format must be 'svg' or 'png', got '${format}'`);
  }
  if (format === "png") {
    throw new Error("raster export is not built in; render to svg");
  }
  return {
    series,
    axis,
    output: o.output,
    format: "svg",
    title: typeof o.title === "string" ? o.title : undefined,
  };
}
