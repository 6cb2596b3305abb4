export interface Rect {
  left: number;
  top: number;
  width: number;
  height: number;
}

/**
 * Map a cue bbox ([x, y, w, h] in natural image pixels) onto the rendered
 * size of the image element. Scaling is linear per axis.
 */
export function scaleRect(
  bbox: [number, number, number, number],
  naturalWidth: number,
  naturalHeight: number,
  renderedWidth: number,
  renderedHeight: number
): Rect {
  const sx = renderedWidth / naturalWidth;
  const sy = renderedHeight / naturalHeight;
  const [x, y, w, h] = bbox;
  return { left: x * sx, top: y * sy, width: w * sx, height: h * sy };
}
