/** HTML rendering for the curation console. Pure functions from state to
 * markup; event wiring happens in main.ts via delegation on data attributes. */

import { CohesionEntry, ExportDecision, ExportMember, RecommendationItem } from "./api.js";
import { ConsoleState } from "./state.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Map a standardized score (roughly z in [-3, 3]) onto a 0..100 bar width. */
export function barWidth(standardized: number): number {
  const clamped = Math.max(-3, Math.min(3, standardized));
  return Math.round(((clamped + 3) / 6) * 100);
}

/** Gauge label: corrected cohesion at or below zero reads as "no signal". */
export function gaugeLabel(corrected: number): string {
  return corrected <= 0 ? "no signal" : corrected.toFixed(3);
}

export function gaugeWidth(corrected: number): number {
  return Math.round(Math.max(0, Math.min(1, corrected)) * 100);
}

function renderBanner(state: ConsoleState): string {
  if (state.connection === "unreachable") {
    return `<div class="banner banner-error" data-testid="banner-unreachable">
      service unreachable
      <button data-action="retry">retry</button>
    </div>`;
  }
  if (state.connection === "stale") {
    return `<div class="banner banner-warn" data-testid="banner-stale">
      this session no longer exists on the server
      <button data-action="reload">reload</button>
    </div>`;
  }
  if (state.notice) {
    return `<div class="banner banner-note" data-testid="banner-notice">${esc(state.notice)}</div>`;
  }
  return "";
}

function renderCard(item: RecommendationItem): string {
  const bars = Object.entries(item.criteria)
    .map(
      ([tag, cell]) => `
      <div class="bar-row">
        <span class="bar-label">${esc(tag)}</span>
        <span class="bar-track"><span class="bar-fill" style="width:${barWidth(cell.standardized)}%"></span></span>
        <span class="bar-value">${cell.standardized.toFixed(2)}</span>
      </div>`,
    )
    .join("");
  return `
  <article class="card" data-testid="candidate-card" data-user-id="${esc(item.user_id)}">
    <header>
      <span class="rank">#${item.rank}</span>
      <span class="screen-name">@${esc(item.screen_name)}</span>
      <span class="aggregate-score" title="aggregate score">${item.score.toFixed(3)}</span>
    </header>
    <div class="bars">${bars}</div>
    <footer>
      <button data-action="accept" data-user-id="${esc(item.user_id)}">accept</button>
      <button data-action="reject" data-user-id="${esc(item.user_id)}">reject</button>
    </footer>
  </article>`;
}

function renderMembers(members: ExportMember[]): string {
  const rows = members
    .map(
      (m) => `<li data-testid="member" data-user-id="${esc(m.user_id)}">
        @${esc(m.screen_name)} <span class="origin origin-${m.origin}">${m.origin}</span>
      </li>`,
    )
    .join("");
  return `<section class="panel" data-testid="member-panel">
    <h2>list members (${members.length})</h2>
    <ul>${rows}</ul>
  </section>`;
}

function renderHistory(decisions: ExportDecision[]): string {
  const rows = decisions
    .map(
      (d) => `<li data-testid="decision" data-seq="${d.seq}">
        <span class="seq">${d.seq}</span>
        <span class="action action-${d.action}">${d.action}</span>
        @${esc(d.user_id)}
        <span class="curator">${esc(d.curator)}</span>
      </li>`,
    )
    .join("");
  return `<section class="panel" data-testid="history-panel">
    <h2>decision history</h2>
    <ol>${rows}</ol>
  </section>`;
}

function renderCohesion(entries: CohesionEntry[]): string {
  const rows = entries
    .map(
      (e) => `
      <div class="gauge-row" data-testid="gauge" data-criterion="${esc(e.criterion)}">
        <span class="gauge-label">${esc(e.criterion)}</span>
        <span class="gauge-track"><span class="gauge-fill" style="width:${gaugeWidth(e.corrected)}%"></span></span>
        <span class="gauge-value${e.corrected <= 0 ? " gauge-null" : ""}">${gaugeLabel(e.corrected)}</span>
      </div>`,
    )
    .join("");
  return `<section class="panel" data-testid="cohesion-panel">
    <h2>seed cohesion</h2>
    ${rows}
  </section>`;
}

export function renderApp(state: ConsoleState): string {
  if (!state.summary) {
    return `${renderBanner(state)}<p class="empty">no session</p>`;
  }
  const flags = [
    state.truncated ? '<span class="flag">truncated</span>' : "",
    state.degenerate ? '<span class="flag">degenerate panel</span>' : "",
    state.busy ? '<span class="flag">working&hellip;</span>' : "",
  ].join("");
  const cards = state.items.map(renderCard).join("");
  return `
  ${renderBanner(state)}
  <header class="session-header" data-testid="session-header">
    <h1>${esc(state.summary.dataset_id)}</h1>
    <span>${state.summary.seed_count} members</span>
    <span>${state.summary.rejected_count} rejected</span>
    <span>${state.summary.decisions} decisions</span>
    ${flags}
  </header>
  <div class="columns">
    <main class="candidates" data-testid="candidate-list">${cards}</main>
    <aside>
      ${renderMembers(state.members)}
      ${renderCohesion(state.cohesion)}
      ${renderHistory(state.decisions)}
      <button class="export" data-action="export">export list</button>
    </aside>
  </div>`;
}
