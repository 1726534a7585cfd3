import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { asciiLevel, buildLevelModel, key } from "../src/render";
import type { PreviewResponse, TombsView } from "../src/types";

const fixture = <T>(name: string): T =>
  JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf-8")) as T;

const view = fixture<TombsView>("tombs_view.json");
const preview = fixture<PreviewResponse>("preview0.json");

describe("level render model", () => {
  it("mirrors the service view verbatim", () => {
    const model = buildLevelModel(view, null);
    expect(model.width).toBe(view.spec.base.width);
    expect(model.height).toBe(view.spec.base.height);
    // every tile comes straight from the grid rows
    for (let y = 0; y < model.height; y++) {
      for (let x = 0; x < model.width; x++) {
        expect(model.blocks[y]![x]).toBe(view.grid[y]![x] === "#");
      }
    }
    expect(model.player).toEqual(view.player);
    expect(model.exit).toEqual(view.spec.exit);
    expect(model.levers.map((l) => l.id)).toEqual(view.spec.levers.map((l) => l.id));
    expect(model.complete).toBe(false);
  });

  it("tints exactly the preview diff cells", () => {
    const model = buildLevelModel(view, preview);
    expect(model.tinted).toEqual(new Set(preview.cells.map(key)));
  });

  it("shows no tint without a preview", () => {
    const model = buildLevelModel(view, null);
    expect(model.tinted.size).toBe(0);
    const empty = buildLevelModel(view, { ...preview, cells: [] });
    expect(empty.tinted.size).toBe(0);
  });

  it("drops collected treasures from the model", () => {
    const taken = view.spec.treasures[0]!;
    const after: TombsView = { ...view, collected: [taken] };
    const model = buildLevelModel(after, null);
    expect(model.treasures.map(key)).not.toContain(key(taken));
    expect(model.treasures.length).toBe(view.spec.treasures.length - 1);
  });

  it("renders the golden session view stably", () => {
    const model = buildLevelModel(view, preview);
    expect(asciiLevel(model)).toMatchSnapshot();
  });
});
