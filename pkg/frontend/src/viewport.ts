import type { MapPoint, ViewportState } from './types.js';

/** Pan/zoom transform between world coordinates and screen pixels.
 * Screen y grows downward; world y grows upward. All operations are pure
 * and zooming in then out by the same factor about the same anchor
 * restores the state up to floating-point noise. */

export function worldToScreen(
  v: ViewportState, width: number, height: number, x: number, y: number,
): [number, number] {
  return [
    width / 2 + (x - v.centerX) * v.zoom,
    height / 2 - (y - v.centerY) * v.zoom,
  ];
}

export function screenToWorld(
  v: ViewportState, width: number, height: number, sx: number, sy: number,
): [number, number] {
  return [
    v.centerX + (sx - width / 2) / v.zoom,
    v.centerY - (sy - height / 2) / v.zoom,
  ];
}

/** Zoom by `factor` keeping the world point under (sx, sy) fixed. */
export function zoomAt(
  v: ViewportState, width: number, height: number,
  factor: number, sx: number, sy: number,
): ViewportState {
  const [wx, wy] = screenToWorld(v, width, height, sx, sy);
  const zoom = v.zoom * factor;
  return {
    centerX: wx - (sx - width / 2) / zoom,
    centerY: wy + (sy - height / 2) / zoom,
    zoom,
  };
}

export function pan(v: ViewportState, dxPixels: number, dyPixels: number): ViewportState {
  return {
    centerX: v.centerX - dxPixels / v.zoom,
    centerY: v.centerY + dyPixels / v.zoom,
    zoom: v.zoom,
  };
}

export function centerOn(v: ViewportState, x: number, y: number): ViewportState {
  return { centerX: x, centerY: y, zoom: v.zoom };
}

/** Frame all points with a margin; a lone point gets a unit zoom. */
export function fitToPoints(
  points: readonly MapPoint[], width: number, height: number, margin = 0.9,
): ViewportState {
  if (points.length === 0) {
    return { centerX: 0, centerY: 0, zoom: 1 };
  }
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const p of points) {
    if (p.x < minX) minX = p.x;
    if (p.x > maxX) maxX = p.x;
    if (p.y < minY) minY = p.y;
    if (p.y > maxY) maxY = p.y;
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const zoom = Math.min((width / spanX) * margin, (height / spanY) * margin);
  return { centerX: (minX + maxX) / 2, centerY: (minY + maxY) / 2, zoom };
}
