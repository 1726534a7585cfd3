import { ApiClient, ServiceError } from "./client";
import type { StoryView, Vision } from "./types";

/**
 * One story session: a scene panel plus one card per choice. Each card
 * carries a depth slider and a single peek button — the budget is one
 * vision per branch per decision, so the button disables after use and
 * only choosing re-arms it. Vision contents and the "1 of N futures"
 * reliability label come verbatim from the service.
 */
export class StoryController {
  private view: StoryView;
  private visions = new Map<number, Vision>();
  private busy = false;

  constructor(
    private api: ApiClient,
    view: StoryView,
    private host: HTMLElement,
  ) {
    this.view = view;
    this.render();
  }

  get currentView(): StoryView {
    return this.view;
  }

  card(choice: number): HTMLElement | null {
    return this.host.querySelector(`.story-card[data-choice="${choice}"]`);
  }

  async peek(choice: number): Promise<void> {
    if (this.busy || this.view.ended || this.view.peeked.includes(choice)) return;
    const slider = this.card(choice)?.querySelector<HTMLInputElement>(".depth-slider");
    const d = slider ? Number(slider.value) : 1;
    this.busy = true;
    try {
      const res = await this.api.peek(this.view.sessionId, choice, d, this.view.revision);
      this.view = {
        ...this.view,
        revision: res.revision,
        peeked: [...this.view.peeked, choice].sort((a, b) => a - b),
      };
      this.visions.set(choice, res.vision);
      this.render();
    } catch (err) {
      if (err instanceof ServiceError &&
          (err.code === "revision-conflict" || err.code === "peek-budget-exhausted")) {
        await this.refresh();
      } else {
        throw err;
      }
    } finally {
      this.busy = false;
    }
  }

  async choose(choice: number): Promise<void> {
    if (this.busy || this.view.ended) return;
    this.busy = true;
    try {
      this.view = await this.api.choose(this.view.sessionId, choice, this.view.revision);
      this.visions.clear(); // a decision was made; every budget resets
      this.render();
    } catch (err) {
      if (err instanceof ServiceError && err.code === "revision-conflict") {
        await this.refresh();
      } else {
        throw err;
      }
    } finally {
      this.busy = false;
    }
  }

  private async refresh(): Promise<void> {
    this.view = (await this.api.getSession(this.view.sessionId)) as StoryView;
    this.visions.clear();
    this.render();
  }

  private render(): void {
    const doc = this.host.ownerDocument;
    this.host.innerHTML = "";

    const scene = doc.createElement("div");
    scene.className = "scene";
    scene.textContent = this.view.sceneText;
    this.host.appendChild(scene);

    if (this.view.ended) {
      const end = doc.createElement("div");
      end.className = "story-end";
      end.textContent = "The story has reached its end.";
      this.host.appendChild(end);
      return;
    }

    const row = doc.createElement("div");
    row.className = "card-row";
    this.host.appendChild(row);

    this.view.choiceLabels.forEach((label, i) => {
      const card = doc.createElement("div");
      card.className = "story-card";
      card.dataset.choice = String(i);

      const title = doc.createElement("h3");
      title.textContent = label;
      card.appendChild(title);

      const sliderWrap = doc.createElement("label");
      sliderWrap.className = "depth-wrap";
      sliderWrap.textContent = "look ahead ";
      const slider = doc.createElement("input");
      slider.type = "range";
      slider.className = "depth-slider";
      slider.min = "1";
      slider.max = String(this.view.remainingDepth);
      slider.value = String(this.view.remainingDepth);
      sliderWrap.appendChild(slider);
      card.appendChild(sliderWrap);

      const peekBtn = doc.createElement("button");
      peekBtn.className = "peek-btn";
      peekBtn.textContent = "peek";
      peekBtn.disabled = this.view.peeked.includes(i);
      peekBtn.addEventListener("click", () => void this.peek(i));
      card.appendChild(peekBtn);

      const visionEl = doc.createElement("div");
      visionEl.className = "vision";
      const vision = this.visions.get(i);
      if (vision) {
        const futures = doc.createElement("div");
        futures.className = "futures-label";
        futures.textContent = `1 of ${vision.futuresCount} futures (depth ${vision.d})`;
        visionEl.appendChild(futures);
        for (const [attr, value] of Object.entries(vision.revealed)) {
          const rowEl = doc.createElement("div");
          rowEl.className = "vision-row";
          rowEl.textContent = `${attr}: ${value}`;
          visionEl.appendChild(rowEl);
        }
      }
      card.appendChild(visionEl);

      const chooseBtn = doc.createElement("button");
      chooseBtn.className = "choose-btn";
      chooseBtn.textContent = "walk this path";
      chooseBtn.addEventListener("click", () => void this.choose(i));
      card.appendChild(chooseBtn);

      row.appendChild(card);
    });
  }
}
