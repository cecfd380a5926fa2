// Pure pad state and rendering math, kept free of DOM and network so the
// node test suite can exercise it directly. All scoring comes from the
// server; this module only reshapes server-provided numbers for display.

export interface Dims {
  w: number;
  h: number;
}

export class PadGrid {
  readonly dims: Dims;
  readonly cells: Uint8Array;

  constructor(dims: Dims, cells?: Uint8Array) {
    if (dims.w < 1 || dims.h < 1) throw new Error("grid must be at least 1x1");
    this.dims = dims;
    this.cells = cells ?? new Uint8Array(dims.w * dims.h);
    if (this.cells.length !== dims.w * dims.h) {
      throw new Error("cell buffer does not match dims");
    }
  }

  static fromRows(rows: string[]): PadGrid {
    const h = rows.length;
    const w = h > 0 ? rows[0].length : 0;
    const grid = new PadGrid({ w, h });
    rows.forEach((row, y) => {
      if (row.length !== w) throw new Error(`row ${y} has wrong width`);
      for (let x = 0; x < w; x++) {
        if (row[x] === "#") grid.set(x, y, 1);
        else if (row[x] !== ".") throw new Error(`bad cell char ${row[x]}`);
      }
    });
    return grid;
  }

  private index(x: number, y: number): number {
    if (x < 0 || y < 0 || x >= this.dims.w || y >= this.dims.h) {
      throw new Error(`cell (${x},${y}) outside ${this.dims.w}x${this.dims.h}`);
    }
    return y * this.dims.w + x;
  }

  get(x: number, y: number): 0 | 1 {
    return this.cells[this.index(x, y)] as 0 | 1;
  }

  set(x: number, y: number, value: 0 | 1): void {
    this.cells[this.index(x, y)] = value;
  }

  toggle(x: number, y: number): 0 | 1 {
    const next = this.get(x, y) ? 0 : 1;
    this.set(x, y, next);
    return next;
  }

  clear(): void {
    this.cells.fill(0);
  }

  invert(): void {
    for (let i = 0; i < this.cells.length; i++) this.cells[i] ^= 1;
  }

  isEmpty(): boolean {
    return !this.cells.some((c) => c !== 0);
  }

  inkCount(): number {
    return this.cells.reduce((acc, c) => acc + c, 0);
  }

  toRows(): string[] {
    const rows: string[] = [];
    for (let y = 0; y < this.dims.h; y++) {
      let row = "";
      for (let x = 0; x < this.dims.w; x++) row += this.get(x, y) ? "#" : ".";
      rows.push(row);
    }
    return rows;
  }
}

/** One stroke of drag painting: every visited cell takes the value decided
 * by the first cell the stroke touched, so dragging paints contiguously
 * instead of flickering cells on and off. */
export class Stroke {
  private paint: 0 | 1 | null = null;

  visit(grid: PadGrid, x: number, y: number): void {
    if (this.paint === null) this.paint = grid.get(x, y) ? 0 : 1;
    grid.set(x, y, this.paint);
  }

  finish(): void {
    this.paint = null;
  }
}

/** Weight scaled to [-1, 1] by the teach count (the maximum magnitude any
 * weight can reach). */
export function heatLevel(weight: number, teachCount: number): number {
  if (teachCount <= 0) return 0;
  return Math.max(-1, Math.min(1, weight / teachCount));
}

/** Diverging blue (negative) to white (zero) to red (positive). */
export function heatColor(weight: number, teachCount: number): string {
  const level = heatLevel(weight, teachCount);
  const other = Math.round(255 * (1 - Math.abs(level)));
  return level >= 0
    ? `rgb(255, ${other}, ${other})`
    : `rgb(${other}, ${other}, 255)`;
}

/** Fraction of the bar to fill for a quotient, clamped to [0, 1]; the
 * display text always comes from the server's q_display. */
export function barFraction(qNum: number, qDen: number): number {
  if (qDen === 0) return 0;
  return Math.max(0, Math.min(1, qNum / qDen));
}

/** Mirror of the server's label rules, for friendlier client-side
 * feedback; the server still has the final word (422). */
export function labelProblem(label: string): string | null {
  if (label.length === 0) return "label is empty";
  if (label.length > 64) return "label is longer than 64 characters";
  if (/\s/.test(label)) return "label contains whitespace";
  for (const ch of label) {
    const code = ch.codePointAt(0) ?? 0;
    if (code < 0x20 || code === 0x7f) return "label contains a control character";
  }
  return null;
}

/** Tracks the server's mutation counter. Returns true when someone else
 * changed the knowledge base (a version we did not produce ourselves),
 * meaning cached labels and decisions are stale. */
export class VersionTracker {
  private known = -1;

  /** Record a version we caused or already displayed. */
  absorb(version: number): void {
    if (version > this.known) this.known = version;
  }

  /** Check a polled version; true means a foreign change happened. */
  isForeign(version: number): boolean {
    return this.known >= 0 && version > this.known;
  }
}
