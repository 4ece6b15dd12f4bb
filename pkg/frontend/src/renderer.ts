import { colorFor, yearDomain, YearDomain } from './colors.js';
import { worldToScreen } from './viewport.js';
import type { MapPoint, ViewState } from './types.js';

/** The subset of CanvasRenderingContext2D the renderer needs; tests pass a
 * recording stub. */
export interface Canvas2DLike {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
}

const POINT_RADIUS = 2.5;
const HIGHLIGHT_RADIUS = 6;

export function drawMap(
  ctx: Canvas2DLike,
  points: readonly MapPoint[],
  state: ViewState,
  width: number,
  height: number,
  domain?: YearDomain,
): number {
  const years = domain ?? yearDomain(points);
  ctx.clearRect(0, 0, width, height);
  let drawn = 0;
  for (const point of points) {
    const [sx, sy] = worldToScreen(state.viewport, width, height, point.x, point.y);
    if (sx < -POINT_RADIUS || sx > width + POINT_RADIUS ||
        sy < -POINT_RADIUS || sy > height + POINT_RADIUS) {
      continue;
    }
    ctx.fillStyle = colorFor(point, state.colorMode, years);
    ctx.beginPath();
    ctx.arc(sx, sy, POINT_RADIUS, 0, Math.PI * 2);
    ctx.fill();
    drawn += 1;
  }
  for (const id of [state.hoveredId, state.selectedId]) {
    if (!id) continue;
    const point = points.find((p) => p.id === id);
    if (!point) continue;
    const [sx, sy] = worldToScreen(state.viewport, width, height, point.x, point.y);
    ctx.strokeStyle = id === state.selectedId ? '#000000' : '#555555';
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.arc(sx, sy, HIGHLIGHT_RADIUS, 0, Math.PI * 2);
    ctx.stroke();
  }
  return drawn;
}
