export { parseSweepCsv, toGrid, REQUIRED_COLUMNS } from "./csv.js";
export type { SweepData, SweepRow, SweepGrid } from "./csv.js";
export {
  renderPanel,
  renderPanelBody,
  renderGrid,
  regionCount,
  colormap,
  DEFAULT_LEVELS,
  REGION_FILL,
  PANEL_WIDTH,
  PANEL_HEIGHT,
} from "./panels.js";
export type { PanelSpec, Quantity, GridPanel } from "./panels.js";
export { isoSegments } from "./contours.js";
export type { Segment } from "./contours.js";
