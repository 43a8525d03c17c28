/** Marching-squares iso-lines on a regular grid.
 *
 * Values are sampled at grid nodes (xs[i], ys[j]); segments are produced per
 * lattice cell with linear interpolation along the edges. Points exactly at
 * the level count as "below", matching a strict greater-than shading rule.
 */

export interface Segment {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

function lerp(a: number, b: number, va: number, vb: number, level: number): number {
  const t = (level - va) / (vb - va);
  return a + t * (b - a);
}

export function isoSegments(
  xs: number[],
  ys: number[],
  value: (i: number, j: number) => number,
  level: number,
): Segment[] {
  const segments: Segment[] = [];
  for (let i = 0; i + 1 < xs.length; i++) {
    for (let j = 0; j + 1 < ys.length; j++) {
      const v00 = value(i, j);
      const v10 = value(i + 1, j);
      const v01 = value(i, j + 1);
      const v11 = value(i + 1, j + 1);
      if ([v00, v10, v01, v11].some((v) => !Number.isFinite(v))) continue;
      let code = 0;
      if (v00 > level) code |= 1;
      if (v10 > level) code |= 2;
      if (v11 > level) code |= 4;
      if (v01 > level) code |= 8;
      if (code === 0 || code === 15) continue;

      const x0 = xs[i];
      const x1 = xs[i + 1];
      const y0 = ys[j];
      const y1 = ys[j + 1];
      // crossing points on the four cell edges
      const bottom = () => ({ x: lerp(x0, x1, v00, v10, level), y: y0 });
      const top = () => ({ x: lerp(x0, x1, v01, v11, level), y: y1 });
      const left = () => ({ x: x0, y: lerp(y0, y1, v00, v01, level) });
      const right = () => ({ x: x1, y: lerp(y0, y1, v10, v11, level) });

      const emit = (a: { x: number; y: number }, b: { x: number; y: number }) =>
        segments.push({ x1: a.x, y1: a.y, x2: b.x, y2: b.y });

      switch (code) {
        case 1:
        case 14:
          emit(left(), bottom());
          break;
        case 2:
        case 13:
          emit(bottom(), right());
          break;
        case 3:
        case 12:
          emit(left(), right());
          break;
        case 4:
        case 11:
          emit(right(), top());
          break;
        case 6:
        case 9:
          emit(bottom(), top());
          break;
        case 7:
        case 8:
          emit(left(), top());
          break;
        case 5: {
          // saddle: resolve by the cell-centre value
          const centre = (v00 + v10 + v01 + v11) / 4;
          if (centre > level) {
            emit(left(), top());
            emit(bottom(), right());
          } else {
            emit(left(), bottom());
            emit(right(), top());
          }
          break;
        }
        case 10: {
          const centre = (v00 + v10 + v01 + v11) / 4;
          if (centre > level) {
            emit(left(), bottom());
            emit(right(), top());
          } else {
            emit(left(), top());
            emit(bottom(), right());
          }
          break;
        }
      }
    }
  }
  return segments;
}
