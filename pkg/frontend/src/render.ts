import type { Cell, PreviewResponse, TombsView } from "./types";

export const TILE = 18; // px

const PALETTE = {
  block: "#2e2b38",
  open: "#d8cfb4",
  tint: "rgba(255, 170, 40, 0.55)", // cells the previewed flip would change
  gridLine: "#00000022",
  player: "#d6452c",
  exit: "#1f7a6d",
  lever: "#6b4fd8",
  treasure: "#c9a227",
};

export const key = (c: Cell): string => `${c[0]},${c[1]}`;

/**
 * Everything the canvas draws, as plain data. Built verbatim from the
 * latest session view plus (optionally) the latest preview response —
 * no cell in here is computed client-side.
 */
export interface LevelModel {
  width: number;
  height: number;
  blocks: boolean[][]; // [y][x], straight from the view's grid rows
  player: Cell;
  exit: Cell;
  levers: { id: number; cell: Cell }[];
  treasures: Cell[]; // still uncollected
  tinted: Set<string>; // preview diff cells, keyed "x,y"
  complete: boolean;
}

export function buildLevelModel(
  view: TombsView,
  preview: PreviewResponse | null,
): LevelModel {
  const blocks = view.grid.map((row) => [...row].map((ch) => ch === "#"));
  const collected = new Set(view.collected.map(key));
  return {
    width: view.spec.base.width,
    height: view.spec.base.height,
    blocks,
    player: view.player,
    exit: view.spec.exit,
    levers: view.spec.levers.map((lv) => ({ id: lv.id, cell: lv.cell })),
    treasures: view.spec.treasures.filter((t) => !collected.has(key(t))),
    tinted: new Set((preview?.cells ?? []).map(key)),
    complete: view.complete,
  };
}

export function drawLevel(canvas: HTMLCanvasElement, model: LevelModel): void {
  canvas.width = model.width * TILE;
  canvas.height = model.height * TILE;
  const ctx = canvas.getContext("2d");
  if (!ctx) return; // non-rendering environments (tests) read the model instead

  for (let y = 0; y < model.height; y++) {
    for (let x = 0; x < model.width; x++) {
      ctx.fillStyle = model.blocks[y]?.[x] ? PALETTE.block : PALETTE.open;
      ctx.fillRect(x * TILE, y * TILE, TILE, TILE);
      ctx.strokeStyle = PALETTE.gridLine;
      ctx.strokeRect(x * TILE + 0.5, y * TILE + 0.5, TILE - 1, TILE - 1);
    }
  }

  for (const k of model.tinted) {
    const [x, y] = k.split(",").map(Number) as [number, number];
    ctx.fillStyle = PALETTE.tint;
    ctx.fillRect(x * TILE, y * TILE, TILE, TILE);
  }

  for (const t of model.treasures) {
    ctx.fillStyle = PALETTE.treasure;
    ctx.beginPath();
    ctx.arc((t[0] + 0.5) * TILE, (t[1] + 0.5) * TILE, TILE * 0.2, 0, Math.PI * 2);
    ctx.fill();
  }

  for (const lv of model.levers) {
    const [x, y] = lv.cell;
    ctx.fillStyle = PALETTE.lever;
    ctx.beginPath(); // a small diamond
    ctx.moveTo((x + 0.5) * TILE, y * TILE + 3);
    ctx.lineTo((x + 1) * TILE - 3, (y + 0.5) * TILE);
    ctx.lineTo((x + 0.5) * TILE, (y + 1) * TILE - 3);
    ctx.lineTo(x * TILE + 3, (y + 0.5) * TILE);
    ctx.closePath();
    ctx.fill();
  }

  // the square marks the goal
  ctx.strokeStyle = PALETTE.exit;
  ctx.lineWidth = 3;
  ctx.strokeRect(
    model.exit[0] * TILE + 3,
    model.exit[1] * TILE + 3,
    TILE - 6,
    TILE - 6,
  );
  ctx.lineWidth = 1;

  // the circle marks the player
  ctx.fillStyle = PALETTE.player;
  ctx.beginPath();
  ctx.arc(
    (model.player[0] + 0.5) * TILE,
    (model.player[1] + 0.5) * TILE,
    TILE * 0.36,
    0,
    Math.PI * 2,
  );
  ctx.fill();
}

/**
 * Text form of the model, one character per tile, used by snapshot
 * tests (marker precedence: player, exit, lever, treasure, tint).
 */
export function asciiLevel(model: LevelModel): string {
  const rows: string[] = [];
  const leverCells = new Set(model.levers.map((lv) => key(lv.cell)));
  const treasureCells = new Set(model.treasures.map(key));
  for (let y = 0; y < model.height; y++) {
    let row = "";
    for (let x = 0; x < model.width; x++) {
      const k = `${x},${y}`;
      if (k === key(model.player)) row += "P";
      else if (k === key(model.exit)) row += "E";
      else if (leverCells.has(k)) row += "L";
      else if (treasureCells.has(k)) row += "T";
      else if (model.tinted.has(k)) row += "*";
      else row += model.blocks[y]?.[x] ? "#" : ".";
    }
    rows.push(row);
  }
  return rows.join("\n");
}
