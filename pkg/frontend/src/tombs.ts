import { ApiClient, ServiceError } from "./client";
import { buildLevelModel, type LevelModel } from "./render";
import type { Cell, Direction, PreviewResponse, TombsView } from "./types";

export interface TombsCallbacks {
  /** Called after every state or preview change with the fresh model. */
  onRender(model: LevelModel, view: TombsView): void;
  /** The service rejected a move (wall/bounds) — shake, don't change. */
  onBlocked(): void;
  onStatus(text: string): void;
}

const OFFSETS: Record<Direction, Cell> = {
  N: [0, -1],
  E: [1, 0],
  S: [0, 1],
  W: [-1, 0],
};

/**
 * Drives one Tombs session. All game truth lives on the server: this
 * class forwards inputs, stores the latest view/preview verbatim, and
 * rebuilds the render model. Mutations are queued so at most one is in
 * flight; a stale-revision rejection triggers a refetch, never a merge.
 */
export class TombsController {
  private view: TombsView;
  private preview: PreviewResponse | null = null;
  private chain: Promise<void> = Promise.resolve();

  constructor(
    private api: ApiClient,
    view: TombsView,
    private cb: TombsCallbacks,
  ) {
    this.view = view;
    void this.enqueue(() => this.refreshPreview());
  }

  get currentView(): TombsView {
    return this.view;
  }

  get model(): LevelModel {
    return buildLevelModel(this.view, this.preview);
  }

  /** Settles when every queued mutation has finished. */
  idle(): Promise<void> {
    return this.chain;
  }

  move(dir: Direction): Promise<void> {
    return this.enqueue(async () => {
      await this.mutate(
        () => this.api.move(this.view.sessionId, dir, this.view.revision),
      );
    });
  }

  /** Pull the lever under the player, if any. */
  flipHere(): Promise<void> {
    return this.enqueue(async () => {
      const lever = this.leverAt(this.view.player);
      if (lever === null) {
        this.cb.onBlocked();
        return;
      }
      await this.mutate(
        () => this.api.flip(this.view.sessionId, lever, this.view.revision),
      );
    });
  }

  private enqueue(op: () => Promise<void>): Promise<void> {
    const next = this.chain.then(op);
    // keep the chain alive after a failure; the op itself reported it
    this.chain = next.catch(() => {});
    return next;
  }

  private async mutate(send: () => Promise<TombsView>): Promise<void> {
    try {
      this.view = await send();
    } catch (err) {
      if (err instanceof ServiceError && err.code === "revision-conflict") {
        // someone else advanced this session: adopt the server's state
        this.view = (await this.api.getSession(this.view.sessionId)) as TombsView;
        this.preview = null;
        this.cb.onStatus("session changed elsewhere; view refreshed");
      } else if (err instanceof ServiceError && err.code === "illegal-move") {
        this.cb.onBlocked();
        return; // nothing changed; keep the current preview
      } else {
        throw err;
      }
    }
    await this.refreshPreview();
    if (this.view.complete) this.cb.onStatus("You made it out!");
  }

  private leverAt(cell: Cell): number | null {
    for (const lv of this.view.spec.levers) {
      if (lv.cell[0] === cell[0] && lv.cell[1] === cell[1]) return lv.id;
    }
    return null;
  }

  /** The lever the player stands on, else one on an adjacent tile. */
  private nearbyLever(): number | null {
    const here = this.leverAt(this.view.player);
    if (here !== null) return here;
    for (const dir of ["N", "E", "S", "W"] as Direction[]) {
      const [dx, dy] = OFFSETS[dir];
      const lever = this.leverAt([
        this.view.player[0] + dx,
        this.view.player[1] + dy,
      ]);
      if (lever !== null) return lever;
    }
    return null;
  }

  private async refreshPreview(): Promise<void> {
    const lever = this.view.spec.previewEnabled === false ? null : this.nearbyLever();
    if (lever === null) {
      this.preview = null; // moved away: the overlay clears
    } else {
      try {
        this.preview = await this.api.preview(this.view.sessionId, lever);
      } catch {
        this.preview = null;
      }
    }
    this.cb.onRender(this.model, this.view);
  }
}
