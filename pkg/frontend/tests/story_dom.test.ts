import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeEach, describe, expect, it } from "vitest";

import type { ApiClient } from "../src/client";
import { StoryController } from "../src/story";
import type { PeekResponse, StoryView } from "../src/types";

const fixture = <T>(name: string): T =>
  JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf-8")) as T;

const baseView = fixture<StoryView>("story_view.json");
const peekResponse = fixture<PeekResponse>("peek_response.json");

/** Canned service: real captured payloads, call counting, no network. */
function makeStub() {
  const calls = { peek: 0, choose: 0 };
  const stub = {
    peek: async (_sid: string, choice: number, d: number) => {
      calls.peek += 1;
      return {
        vision: { ...peekResponse.vision, choice, d },
        revision: baseView.revision + calls.peek,
      };
    },
    choose: async (): Promise<StoryView> => {
      calls.choose += 1;
      return {
        ...baseView,
        revision: 10,
        depth: 1,
        remainingDepth: baseView.remainingDepth - 1,
        peeked: [],
        path: [0],
        sceneText: "A different cavern mouth.",
      };
    },
    getSession: async (): Promise<StoryView> => baseView,
  };
  return { api: stub as unknown as ApiClient, calls };
}

describe("story cards", () => {
  let host: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "<div id='story'></div>";
    host = document.getElementById("story")!;
  });

  it("renders one card per choice with slider and peek button", () => {
    const { api } = makeStub();
    new StoryController(api, baseView, host);
    const cards = host.querySelectorAll(".story-card");
    expect(cards.length).toBe(baseView.choiceLabels.length);
    const slider = cards[0]!.querySelector<HTMLInputElement>(".depth-slider")!;
    expect(slider.min).toBe("1");
    expect(slider.max).toBe(String(baseView.remainingDepth));
    expect(cards[0]!.querySelector(".peek-btn")).not.toBeNull();
  });

  it("shows the reliability label and revealed rows after a peek", async () => {
    const { api } = makeStub();
    const ctl = new StoryController(api, baseView, host);
    await ctl.peek(0);
    const label = ctl.card(0)!.querySelector(".futures-label")!;
    expect(label.textContent).toContain(`1 of ${peekResponse.vision.futuresCount} futures`);
    const rows = ctl.card(0)!.querySelectorAll(".vision-row");
    expect(rows.length).toBe(Object.keys(peekResponse.vision.revealed).length);
  });

  it("disables the peek button after one use and stops further requests", async () => {
    const { api, calls } = makeStub();
    const ctl = new StoryController(api, baseView, host);
    await ctl.peek(0);
    const btn = ctl.card(0)!.querySelector<HTMLButtonElement>(".peek-btn")!;
    expect(btn.disabled).toBe(true);
    await ctl.peek(0); // budget spent: must not reach the service
    expect(calls.peek).toBe(1);
    // the other branch still has its budget
    const other = ctl.card(1)!.querySelector<HTMLButtonElement>(".peek-btn")!;
    expect(other.disabled).toBe(false);
  });

  it("keeps an earlier vision visible when another card peeks", async () => {
    const { api } = makeStub();
    const ctl = new StoryController(api, baseView, host);
    await ctl.peek(0);
    await ctl.peek(1);
    expect(ctl.card(0)!.querySelector(".futures-label")).not.toBeNull();
    expect(ctl.card(1)!.querySelector(".futures-label")).not.toBeNull();
  });

  it("re-arms every peek budget after choosing", async () => {
    const { api, calls } = makeStub();
    const ctl = new StoryController(api, baseView, host);
    await ctl.peek(0);
    await ctl.choose(0);
    expect(calls.choose).toBe(1);
    const btn = ctl.card(0)!.querySelector<HTMLButtonElement>(".peek-btn")!;
    expect(btn.disabled).toBe(false);
    expect(ctl.card(0)!.querySelector(".futures-label")).toBeNull(); // visions cleared
  });

  it("shows the ending banner instead of cards when the story ends", () => {
    const { api } = makeStub();
    const ended: StoryView = { ...baseView, ended: true, remainingDepth: 0 };
    new StoryController(api, ended, host);
    expect(host.querySelector(".story-end")).not.toBeNull();
    expect(host.querySelectorAll(".story-card").length).toBe(0);
  });
});
