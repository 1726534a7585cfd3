// Shapes of the session service's JSON payloads. The client displays
// these verbatim; it never derives game state on its own.

export type Cell = [number, number];
export type Direction = "N" | "E" | "S" | "W";

export interface BaseParams {
  seed: number;
  width: number;
  height: number;
  irc: number;
  noi: number;
  blockThreshold: number;
}

export interface LeverSpec {
  id: number;
  cell: Cell;
  axis: "IRC" | "NOI";
  delta: number;
}

export interface LevelSpec {
  base: BaseParams;
  levers: LeverSpec[];
  start: Cell;
  exit: Cell;
  treasures: Cell[];
  initialConfig: string;
  previewEnabled?: boolean;
}

export interface SolutionStep {
  op: "move" | "flip";
  arg: string | number;
}

export interface LevelReport {
  solvable: boolean;
  minFlips: number | null;
  explorableFraction: number;
  reachableConfigs: number;
  treasures: { cell: Cell; reachable: boolean }[];
  solution: SolutionStep[] | null;
}

export interface LevelDoc {
  levelId: string;
  spec: LevelSpec;
  report: LevelReport;
}

export interface TombsView {
  sessionId: string;
  mode: "TOMBS";
  revision: number;
  levelId: string;
  spec: LevelSpec;
  config: string;
  player: Cell;
  collected: Cell[];
  flipCount: number;
  complete: boolean;
  grid: string[];
}

export interface StoryParams {
  seed: number;
  branching: number;
  depth: number;
  sessionSeed: number;
}

export interface StoryView {
  sessionId: string;
  mode: "STORY";
  revision: number;
  storyParams: StoryParams;
  sceneId: number;
  sceneText: string;
  attributes: Record<string, string>;
  choiceLabels: string[];
  depth: number;
  remainingDepth: number;
  peeked: number[];
  path: number[];
  ended: boolean;
}

export type SessionView = TombsView | StoryView;

export interface PreviewResponse {
  lever: number;
  cells: Cell[];
  revision: number;
}

export interface Vision {
  choice: number;
  d: number;
  futuresCount: number;
  revealed: Record<string, string>;
}

export interface PeekResponse {
  vision: Vision;
  revision: number;
}
