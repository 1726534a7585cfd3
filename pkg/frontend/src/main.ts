import { ApiClient } from "./client";
import { drawLevel } from "./render";
import { StoryController } from "./story";
import { TombsController } from "./tombs";
import type { Direction } from "./types";

const api = new ApiClient("");

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const num = (id: string): number => Number(($(id) as HTMLInputElement).value);

function setStatus(text: string): void {
  $("status").textContent = text;
}

let tombs: TombsController | null = null;

const KEY_DIRS: Record<string, Direction> = {
  ArrowUp: "N",
  ArrowRight: "E",
  ArrowDown: "S",
  ArrowLeft: "W",
};

async function newTombsGame(): Promise<void> {
  setStatus("carving a cave...");
  try {
    const doc = await api.createLevel({
      base: {
        seed: num("seed"),
        width: num("width"),
        height: num("height"),
        irc: num("irc"),
        noi: num("noi"),
      },
      levers: num("levers"),
      minFlipsAtLeast: num("minflips"),
      treasureCount: num("treasures"),
    });
    const view = await api.createTombsSession(doc.levelId);
    const canvas = $("cave") as unknown as HTMLCanvasElement;
    const wrap = $("cave-wrap");
    tombs = new TombsController(api, view, {
      onRender: (model) => {
        drawLevel(canvas, model);
        $("banner").hidden = !model.complete;
        $("hud").textContent =
          `flips ${view.flipCount} · treasures ${model.treasures.length} left` +
          (doc.report.minFlips !== null ? ` · solvable in ${doc.report.minFlips} flips` : "");
      },
      onBlocked: () => {
        wrap.classList.remove("shake");
        void wrap.offsetWidth; // restart the animation
        wrap.classList.add("shake");
      },
      onStatus: setStatus,
    });
    setStatus(`level ${doc.levelId} ready — arrows move, F pulls a lever`);
  } catch (err) {
    setStatus(String(err));
  }
}

async function newStory(): Promise<void> {
  setStatus("consulting the teller...");
  try {
    const view = await api.createStorySession({
      seed: num("story-seed"),
      branching: num("branching"),
      depth: num("depth"),
    });
    new StoryController(api, view, $("story"));
    setStatus("the story begins");
  } catch (err) {
    setStatus(String(err));
  }
}

function init(): void {
  $("new-game").addEventListener("click", () => void newTombsGame());
  $("new-story").addEventListener("click", () => void newStory());
  $("pull").addEventListener("click", () => void tombs?.flipHere());
  document.addEventListener("keydown", (ev) => {
    if (!tombs) return;
    const dir = KEY_DIRS[ev.key];
    if (dir) {
      ev.preventDefault();
      void tombs.move(dir);
    } else if (ev.key === "f" || ev.key === "F") {
      void tombs.flipHere();
    }
  });
}

init();
